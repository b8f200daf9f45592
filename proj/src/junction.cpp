#include "abn/junction.hpp"

#include <algorithm>
#include <numeric>
#include <tuple>

#include "abn/errors.hpp"

namespace abn {

bool JunctionTree::contains(int clique, int var) const {
  const std::vector<int>& c = cliques[static_cast<std::size_t>(clique)];
  return std::binary_search(c.begin(), c.end(), var);
}

int JunctionTree::first_clique_with(int var) const {
  for (std::size_t i = 0; i < cliques.size(); ++i) {
    if (contains(static_cast<int>(i), var)) return static_cast<int>(i);
  }
  return -1;
}

namespace {

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int n) : parent(static_cast<std::size_t>(n)) {
    std::iota(parent.begin(), parent.end(), 0);
  }
  int find(int x) {
    while (parent[static_cast<std::size_t>(x)] != x) {
      x = parent[static_cast<std::size_t>(x)] =
          parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
    }
    return x;
  }
  bool join(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent[static_cast<std::size_t>(a)] = b;
    return true;
  }
};

}  // namespace

JunctionTree build_junction_tree(const std::vector<std::vector<std::string>>& cliques,
                                 const Network& net) {
  // Deterministic clique order: lexicographic by sorted member names.
  std::vector<std::vector<std::string>> ordered = cliques;
  for (auto& c : ordered) std::sort(c.begin(), c.end());
  std::sort(ordered.begin(), ordered.end());

  JunctionTree jt;
  for (const auto& names : ordered) {
    std::vector<int> ids;
    ids.reserve(names.size());
    for (const std::string& name : names) ids.push_back(net.require_variable(name));
    std::sort(ids.begin(), ids.end());
    jt.cliques.push_back(std::move(ids));
  }
  int m = static_cast<int>(jt.cliques.size());

  // Candidate edges sorted for a deterministic maximum-weight spanning tree.
  struct Candidate {
    int sep_size;
    std::int64_t sep_table;
    int a, b;
    std::vector<int> sep;
  };
  std::vector<Candidate> candidates;
  for (int i = 0; i < m; ++i) {
    for (int j = i + 1; j < m; ++j) {
      std::vector<int> sep;
      std::set_intersection(jt.cliques[static_cast<std::size_t>(i)].begin(),
                            jt.cliques[static_cast<std::size_t>(i)].end(),
                            jt.cliques[static_cast<std::size_t>(j)].begin(),
                            jt.cliques[static_cast<std::size_t>(j)].end(),
                            std::back_inserter(sep));
      std::int64_t table = 1;
      for (int v : sep) table *= net.cardinality(v);
      candidates.push_back({static_cast<int>(sep.size()), table, i, j, std::move(sep)});
    }
  }
  std::sort(candidates.begin(), candidates.end(), [](const Candidate& x, const Candidate& y) {
    return std::tuple(-x.sep_size, x.sep_table, x.a, x.b) <
           std::tuple(-y.sep_size, y.sep_table, y.a, y.b);
  });
  UnionFind uf(m);
  for (const Candidate& c : candidates) {
    if (uf.join(c.a, c.b)) {
      jt.edges.push_back({c.a, c.b});
      jt.separators.push_back(c.sep);
    }
  }

  // Potentials: unit tables times the CPT of every family assigned here.
  jt.max_table_size = 0;
  for (const auto& c : jt.cliques) {
    std::vector<int> cards;
    cards.reserve(c.size());
    std::int64_t size = 1;
    for (int v : c) {
      cards.push_back(net.cardinality(v));
      size *= net.cardinality(v);
    }
    jt.max_table_size = std::max(jt.max_table_size, size);
    jt.potentials.emplace_back(c, cards, 1.0);
  }
  for (int id = 0; id < net.node_count(); ++id) {
    std::vector<int> family = net.family_of(id);
    int home = -1;
    for (int c = 0; c < m; ++c) {
      if (std::includes(jt.cliques[static_cast<std::size_t>(c)].begin(),
                        jt.cliques[static_cast<std::size_t>(c)].end(),
                        family.begin(), family.end())) {
        home = c;
        break;
      }
    }
    if (home < 0) {
      fail(Errc::internal, "family of '" + net.var(id).name + "' fits in no clique");
    }
    jt.potentials[static_cast<std::size_t>(home)].multiply_in(
        cpt_table(net, effective_cpt(net, id)));
  }

  // Root: first clique holding the lexicographically smallest variable name.
  int smallest = 0;
  for (int id = 1; id < net.node_count(); ++id) {
    if (net.var(id).name < net.var(smallest).name) smallest = id;
  }
  jt.root = jt.first_clique_with(smallest);
  return jt;
}

JunctionTree build_junction_tree(const Network& net) {
  UndirectedGraph moral = moralize(net);
  std::vector<std::int64_t> cards;
  cards.reserve(moral.vertices.size());
  for (const std::string& name : moral.vertices) {
    cards.push_back(net.cardinality(net.require_variable(name)));
  }
  Triangulation tri = triangulate(moral, cards);
  JunctionTree jt = build_junction_tree(maximal_cliques(tri.graph, tri.order), net);
  jt.elimination_order = tri.order;
  return jt;
}

}  // namespace abn

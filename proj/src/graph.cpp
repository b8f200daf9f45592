#include "abn/graph.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <map>
#include <sstream>

#include "abn/errors.hpp"

namespace abn {

int UndirectedGraph::index_of(const std::string& name) const {
  for (std::size_t i = 0; i < vertices.size(); ++i) {
    if (vertices[i] == name) return static_cast<int>(i);
  }
  return -1;
}

int UndirectedGraph::add_vertex(const std::string& name) {
  int id = index_of(name);
  if (id >= 0) return id;
  vertices.push_back(name);
  return static_cast<int>(vertices.size()) - 1;
}

void UndirectedGraph::add_edge(const std::string& a, const std::string& b) {
  int ia = index_of(a);
  int ib = index_of(b);
  if (ia < 0 || ib < 0) {
    fail(Errc::dangling_reference, "edge references an undeclared vertex");
  }
  add_edge_by_index(ia, ib);
}

void UndirectedGraph::add_edge_by_index(int a, int b) {
  if (a == b) fail(Errc::bad_argument, "self-loops are not allowed");
  edges.insert({std::min(a, b), std::max(a, b)});
}

bool UndirectedGraph::adjacent(int a, int b) const {
  return edges.count({std::min(a, b), std::max(a, b)}) > 0;
}

std::vector<int> UndirectedGraph::neighbors(int v) const {
  std::vector<int> out;
  for (const auto& [a, b] : edges) {
    if (a == v) out.push_back(b);
    if (b == v) out.push_back(a);
  }
  std::sort(out.begin(), out.end());
  return out;
}

UndirectedGraph moralize(const Network& net) {
  UndirectedGraph g;
  for (const Variable& v : net.variables) g.add_vertex(v.name);
  for (int id = 0; id < net.node_count(); ++id) {
    const std::vector<int>& parents = net.parents_of(id);
    for (int p : parents) g.add_edge_by_index(p, id);
    for (std::size_t i = 0; i < parents.size(); ++i) {
      for (std::size_t j = i + 1; j < parents.size(); ++j) {
        g.add_edge_by_index(parents[i], parents[j]);
      }
    }
  }
  return g;
}

namespace {

struct EliminationPick {
  int fill;
  std::int64_t clique_size;
  std::string name;
  int vertex;
};

}  // namespace

Triangulation triangulate(const UndirectedGraph& graph,
                          const std::vector<std::int64_t>& cards) {
  int n = graph.vertex_count();
  std::vector<std::int64_t> card(static_cast<std::size_t>(n), 2);
  if (!cards.empty()) {
    if (static_cast<int>(cards.size()) != n) {
      fail(Errc::bad_argument, "cardinality list does not match the vertex list");
    }
    card = cards;
  }

  std::vector<std::set<int>> adj(static_cast<std::size_t>(n));
  for (const auto& [a, b] : graph.edges) {
    adj[static_cast<std::size_t>(a)].insert(b);
    adj[static_cast<std::size_t>(b)].insert(a);
  }

  Triangulation out;
  out.graph = graph;
  std::vector<bool> gone(static_cast<std::size_t>(n), false);

  for (int step = 0; step < n; ++step) {
    EliminationPick best{-1, 0, "", -1};
    for (int v = 0; v < n; ++v) {
      if (gone[static_cast<std::size_t>(v)]) continue;
      const std::set<int>& nbrs = adj[static_cast<std::size_t>(v)];
      int fill = 0;
      std::int64_t size = card[static_cast<std::size_t>(v)];
      for (auto it = nbrs.begin(); it != nbrs.end(); ++it) {
        size *= card[static_cast<std::size_t>(*it)];
        for (auto jt = std::next(it); jt != nbrs.end(); ++jt) {
          if (!adj[static_cast<std::size_t>(*it)].count(*jt)) ++fill;
        }
      }
      EliminationPick pick{fill, size, graph.vertices[static_cast<std::size_t>(v)], v};
      if (best.vertex < 0 || std::tie(pick.fill, pick.clique_size, pick.name) <
                                 std::tie(best.fill, best.clique_size, best.name)) {
        best = pick;
      }
    }

    int v = best.vertex;
    const std::set<int> nbrs = adj[static_cast<std::size_t>(v)];
    for (auto it = nbrs.begin(); it != nbrs.end(); ++it) {
      for (auto jt = std::next(it); jt != nbrs.end(); ++jt) {
        if (!adj[static_cast<std::size_t>(*it)].count(*jt)) {
          adj[static_cast<std::size_t>(*it)].insert(*jt);
          adj[static_cast<std::size_t>(*jt)].insert(*it);
          out.graph.add_edge_by_index(*it, *jt);
        }
      }
    }
    for (int u : nbrs) adj[static_cast<std::size_t>(u)].erase(v);
    gone[static_cast<std::size_t>(v)] = true;
    out.order.push_back(graph.vertices[static_cast<std::size_t>(v)]);
  }
  return out;
}

std::vector<std::vector<std::string>> maximal_cliques(
    const UndirectedGraph& chordal, const std::vector<std::string>& order) {
  int n = chordal.vertex_count();
  if (static_cast<int>(order.size()) != n) {
    fail(Errc::bad_argument, "elimination order does not cover the vertex set");
  }
  std::vector<int> rank(static_cast<std::size_t>(n), -1);
  for (std::size_t i = 0; i < order.size(); ++i) {
    int v = chordal.index_of(order[i]);
    if (v < 0) fail(Errc::bad_argument, "elimination order names an unknown vertex");
    rank[static_cast<std::size_t>(v)] = static_cast<int>(i);
  }

  std::vector<std::vector<int>> candidates;
  for (int v = 0; v < n; ++v) {
    std::vector<int> clique{v};
    for (int u : chordal.neighbors(v)) {
      if (rank[static_cast<std::size_t>(u)] > rank[static_cast<std::size_t>(v)]) {
        clique.push_back(u);
      }
    }
    // Later neighbors must be pairwise adjacent, or the order is not perfect.
    for (std::size_t i = 1; i < clique.size(); ++i) {
      for (std::size_t j = i + 1; j < clique.size(); ++j) {
        if (!chordal.adjacent(clique[i], clique[j])) {
          fail(Errc::not_chordal, "graph is not chordal under the given order");
        }
      }
    }
    candidates.push_back(std::move(clique));
  }

  std::vector<std::vector<std::string>> named;
  for (auto& c : candidates) {
    std::vector<std::string> names;
    names.reserve(c.size());
    for (int v : c) names.push_back(chordal.vertices[static_cast<std::size_t>(v)]);
    std::sort(names.begin(), names.end());
    named.push_back(std::move(names));
  }
  std::sort(named.begin(), named.end(),
            [](const auto& a, const auto& b) {
              if (a.size() != b.size()) return a.size() > b.size();
              return a < b;
            });
  std::vector<std::vector<std::string>> maximal;
  for (const auto& c : named) {
    bool contained = false;
    for (const auto& m : maximal) {
      if (std::includes(m.begin(), m.end(), c.begin(), c.end())) {
        contained = true;
        break;
      }
    }
    if (!contained) maximal.push_back(c);
  }
  std::sort(maximal.begin(), maximal.end());
  return maximal;
}

std::int64_t table_size(const std::vector<std::string>& clique, const Network& net) {
  std::int64_t size = 1;
  for (const std::string& name : clique) {
    size *= net.cardinality(net.require_variable(name));
  }
  return size;
}

namespace {

struct CliqueSearch {
  std::vector<std::uint64_t> adj;
  std::vector<int> best;  // ranks, ascending
  int best_size = 0;

  // Candidates always lie above the last vertex taken, so cliques are
  // enumerated as ascending rank sequences in lexicographic DFS order and
  // the first one found at a new size is the lexicographically smallest.
  void expand(std::vector<int>& current, std::uint64_t candidates) {
    if (static_cast<int>(current.size()) > best_size) {
      best = current;
      best_size = static_cast<int>(current.size());
    }
    while (candidates) {
      if (static_cast<int>(current.size()) + std::popcount(candidates) <= best_size) {
        return;
      }
      int v = std::countr_zero(candidates);
      candidates &= candidates - 1;
      current.push_back(v);
      expand(current, candidates & adj[static_cast<std::size_t>(v)]);
      current.pop_back();
    }
  }
};

}  // namespace

std::vector<std::string> max_clique(const UndirectedGraph& graph, int max_vertices) {
  int n = graph.vertex_count();
  if (n > max_vertices || n > 64) {
    std::ostringstream msg;
    msg << "graph has " << n << " vertices, limit is " << std::min(max_vertices, 64);
    fail(Errc::size_limit, msg.str());
  }
  if (n == 0) return {};

  // Rank vertices by name so the search enumerates cliques in lexicographic
  // order; the first clique found at the maximum size is then the smallest.
  std::vector<int> by_name(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) by_name[static_cast<std::size_t>(i)] = i;
  std::sort(by_name.begin(), by_name.end(), [&](int a, int b) {
    return graph.vertices[static_cast<std::size_t>(a)] <
           graph.vertices[static_cast<std::size_t>(b)];
  });
  std::vector<int> rank_of(static_cast<std::size_t>(n));
  for (int r = 0; r < n; ++r) rank_of[static_cast<std::size_t>(by_name[static_cast<std::size_t>(r)])] = r;

  CliqueSearch search;
  search.adj.assign(static_cast<std::size_t>(n), 0);
  for (const auto& [a, b] : graph.edges) {
    int ra = rank_of[static_cast<std::size_t>(a)];
    int rb = rank_of[static_cast<std::size_t>(b)];
    search.adj[static_cast<std::size_t>(ra)] |= std::uint64_t{1} << rb;
    search.adj[static_cast<std::size_t>(rb)] |= std::uint64_t{1} << ra;
  }
  std::vector<int> current;
  std::uint64_t all = (n == 64) ? ~std::uint64_t{0} : ((std::uint64_t{1} << n) - 1);
  search.expand(current, all);

  std::vector<std::string> names;
  names.reserve(search.best.size());
  for (int r : search.best) {
    names.push_back(graph.vertices[static_cast<std::size_t>(by_name[static_cast<std::size_t>(r)])]);
  }
  std::sort(names.begin(), names.end());
  return names;
}

UndirectedGraph parse_icg(const std::string& text) {
  UndirectedGraph g;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::size_t a = line.find_first_not_of(" \t\r");
    if (a == std::string::npos) continue;
    std::size_t b = line.find_last_not_of(" \t\r");
    std::string t = line.substr(a, b - a + 1);
    if (t.empty() || t[0] == '#') continue;
    std::size_t sep = t.find("--");
    if (sep == std::string::npos) {
      if (t.find(' ') != std::string::npos || t.find('\t') != std::string::npos) {
        std::ostringstream msg;
        msg << "icg file, line " << line_no << ": vertex names cannot contain spaces";
        fail(Errc::syntax, msg.str());
      }
      g.add_vertex(t);
      continue;
    }
    auto strip = [](std::string s) {
      std::size_t x = s.find_first_not_of(" \t");
      std::size_t y = s.find_last_not_of(" \t");
      if (x == std::string::npos) return std::string();
      return s.substr(x, y - x + 1);
    };
    std::string u = strip(t.substr(0, sep));
    std::string v = strip(t.substr(sep + 2));
    if (u.empty() || v.empty()) {
      std::ostringstream msg;
      msg << "icg file, line " << line_no << ": malformed edge";
      fail(Errc::syntax, msg.str());
    }
    if (g.index_of(u) < 0 || g.index_of(v) < 0) {
      std::ostringstream msg;
      msg << "icg file, line " << line_no << ": edge references an undeclared vertex";
      fail(Errc::dangling_reference, msg.str());
    }
    g.add_edge(u, v);
  }
  return g;
}

}  // namespace abn

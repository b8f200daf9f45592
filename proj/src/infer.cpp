#include "abn/infer.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

#include "abn/errors.hpp"

namespace abn {

namespace {

std::vector<int> all_cards(const Network& net) {
  std::vector<int> cards;
  cards.reserve(net.variables.size());
  for (int id = 0; id < net.node_count(); ++id) cards.push_back(net.cardinality(id));
  return cards;
}

void check_cap(const std::vector<int>& cards, std::int64_t cap) {
  std::int64_t total = config_count(cards);
  if (total > cap) {
    std::ostringstream msg;
    msg << "joint table needs " << total << " entries, cap is " << cap;
    fail(Errc::size_limit, msg.str());
  }
}

}  // namespace

JointTable enumerate_joint(const Network& net, std::int64_t cap) {
  std::vector<int> cards = all_cards(net);
  check_cap(cards, cap);

  int n = net.node_count();
  std::vector<FullCpt> cpts;
  cpts.reserve(static_cast<std::size_t>(n));
  for (int id = 0; id < n; ++id) cpts.push_back(effective_cpt(net, id));

  std::vector<std::vector<int>> pcards(static_cast<std::size_t>(n));
  for (int id = 0; id < n; ++id) {
    for (int p : cpts[static_cast<std::size_t>(id)].parents) {
      pcards[static_cast<std::size_t>(id)].push_back(net.cardinality(p));
    }
  }

  JointTable joint;
  joint.vars.resize(static_cast<std::size_t>(n));
  std::iota(joint.vars.begin(), joint.vars.end(), 0);
  joint.values.assign(static_cast<std::size_t>(config_count(cards)), 0.0);

  std::vector<int> state(static_cast<std::size_t>(n), 0);
  std::vector<int> pstate;
  for (std::size_t idx = 0; idx < joint.values.size(); ++idx) {
    double p = 1.0;
    for (int id = 0; id < n && p > 0.0; ++id) {
      const FullCpt& cpt = cpts[static_cast<std::size_t>(id)];
      pstate.clear();
      for (int par : cpt.parents) pstate.push_back(state[static_cast<std::size_t>(par)]);
      std::int64_t row = config_row(pstate, pcards[static_cast<std::size_t>(id)]);
      p *= cpt.rows[static_cast<std::size_t>(row)][static_cast<std::size_t>(state[static_cast<std::size_t>(id)])];
    }
    joint.values[idx] = p;
    for (std::size_t d = state.size(); d-- > 0;) {
      if (++state[d] < cards[d]) break;
      state[d] = 0;
    }
  }
  return joint;
}

QueryResult query_by_enumeration(const Network& net, int query,
                                 const Evidence& evidence, std::int64_t cap) {
  if (query < 0 || query >= net.node_count()) {
    fail(Errc::unknown_variable, "query variable out of range");
  }
  JointTable joint = enumerate_joint(net, cap);
  std::vector<int> cards = all_cards(net);

  QueryResult result;
  result.distribution.assign(static_cast<std::size_t>(net.cardinality(query)), 0.0);
  double mass = 0.0;
  std::vector<int> state(cards.size(), 0);
  for (std::size_t idx = 0; idx < joint.values.size(); ++idx) {
    bool consistent = true;
    for (const auto& [var, s] : evidence.assignments) {
      if (state[static_cast<std::size_t>(var)] != s) {
        consistent = false;
        break;
      }
    }
    if (consistent) {
      mass += joint.values[idx];
      result.distribution[static_cast<std::size_t>(state[static_cast<std::size_t>(query)])] +=
          joint.values[idx];
    }
    for (std::size_t d = state.size(); d-- > 0;) {
      if (++state[d] < cards[d]) break;
      state[d] = 0;
    }
  }
  if (mass <= 0.0) {
    fail(Errc::impossible_evidence, "evidence has zero probability");
  }
  for (double& v : result.distribution) v /= mass;
  result.evidence_probability = mass;
  return result;
}

namespace {

// Two-phase Hugin propagation on a copy of the base potentials. Returns the
// evidence likelihood; zero means the evidence is impossible.
double propagate(JunctionTree& jt, std::vector<Table>& seps, const Evidence& evidence) {
  for (const auto& [var, state] : evidence.assignments) {
    int clique = jt.first_clique_with(var);
    if (clique < 0) fail(Errc::unknown_variable, "evidence variable fits in no clique");
    jt.potentials[static_cast<std::size_t>(clique)].observe(var, state);
  }

  int m = static_cast<int>(jt.cliques.size());
  std::vector<std::vector<std::pair<int, int>>> adjacency(static_cast<std::size_t>(m));
  seps.assign(jt.edges.size(), Table());
  for (std::size_t e = 0; e < jt.edges.size(); ++e) {
    adjacency[static_cast<std::size_t>(jt.edges[e][0])].push_back({jt.edges[e][1], static_cast<int>(e)});
    adjacency[static_cast<std::size_t>(jt.edges[e][1])].push_back({jt.edges[e][0], static_cast<int>(e)});
  }

  // BFS from the root fixes a parent for every clique.
  std::vector<int> bfs{jt.root};
  std::vector<int> parent(static_cast<std::size_t>(m), -1);
  std::vector<int> parent_edge(static_cast<std::size_t>(m), -1);
  std::vector<bool> seen(static_cast<std::size_t>(m), false);
  seen[static_cast<std::size_t>(jt.root)] = true;
  for (std::size_t i = 0; i < bfs.size(); ++i) {
    int c = bfs[i];
    for (const auto& [next, e] : adjacency[static_cast<std::size_t>(c)]) {
      if (seen[static_cast<std::size_t>(next)]) continue;
      seen[static_cast<std::size_t>(next)] = true;
      parent[static_cast<std::size_t>(next)] = c;
      parent_edge[static_cast<std::size_t>(next)] = e;
      bfs.push_back(next);
    }
  }

  // Separator tables start as units over the separator variables.
  for (std::size_t e = 0; e < jt.edges.size(); ++e) {
    const std::vector<int>& sep = jt.separators[e];
    std::vector<int> cards;
    cards.reserve(sep.size());
    const Table& any = jt.potentials[static_cast<std::size_t>(jt.edges[e][0])];
    for (int v : sep) cards.push_back(any.cards[static_cast<std::size_t>(any.position_of(v))]);
    seps[e] = Table(sep, cards, 1.0);
  }

  // Collect: children push messages toward the root.
  for (std::size_t i = bfs.size(); i-- > 1;) {
    int c = bfs[i];
    int e = parent_edge[static_cast<std::size_t>(c)];
    int p = parent[static_cast<std::size_t>(c)];
    Table msg = jt.potentials[static_cast<std::size_t>(c)].marginal(jt.separators[static_cast<std::size_t>(e)]);
    jt.potentials[static_cast<std::size_t>(p)].absorb(msg, seps[static_cast<std::size_t>(e)]);
    seps[static_cast<std::size_t>(e)] = std::move(msg);
  }

  double likelihood = jt.potentials[static_cast<std::size_t>(jt.root)].sum();
  if (likelihood <= 0.0) return 0.0;

  // Distribute: the root pushes messages back out.
  for (std::size_t i = 1; i < bfs.size(); ++i) {
    int c = bfs[i];
    int e = parent_edge[static_cast<std::size_t>(c)];
    int p = parent[static_cast<std::size_t>(c)];
    Table msg = jt.potentials[static_cast<std::size_t>(p)].marginal(jt.separators[static_cast<std::size_t>(e)]);
    jt.potentials[static_cast<std::size_t>(c)].absorb(msg, seps[static_cast<std::size_t>(e)]);
    seps[static_cast<std::size_t>(e)] = std::move(msg);
  }

  for (Table& t : jt.potentials) t.normalize();
  for (Table& t : seps) t.normalize();
  return likelihood;
}

}  // namespace

CalibratedTree ls_calibrate_unchecked(const JunctionTree& base, const Evidence& evidence) {
  CalibratedTree out;
  out.tree = base;
  out.evidence_likelihood = propagate(out.tree, out.sep_tables, evidence);
  return out;
}

CalibratedTree ls_calibrate(const JunctionTree& base, const Evidence& evidence) {
  CalibratedTree out = ls_calibrate_unchecked(base, evidence);
  if (out.evidence_likelihood <= 0.0) {
    fail(Errc::impossible_evidence, "evidence has zero probability");
  }
  return out;
}

CalibratedTree ls_calibrate(const Network& net, const Evidence& evidence) {
  return ls_calibrate(build_junction_tree(net), evidence);
}

std::vector<double> ls_marginal(const CalibratedTree& tree, int var) {
  int clique = tree.tree.first_clique_with(var);
  if (clique < 0) {
    fail(Errc::unknown_variable, "variable appears in no clique");
  }
  return tree.tree.potentials[static_cast<std::size_t>(clique)].marginal({var}).values;
}

}  // namespace abn

#include "abn/decompose.hpp"

#include <algorithm>
#include <set>

#include "abn/errors.hpp"

namespace abn {

Partition prescribe_partition(const UndirectedGraph& icgraph) {
  if (icgraph.vertex_count() == 0) {
    fail(Errc::bad_argument, "intercausal graph has no vertices");
  }
  Partition partition;
  partition.clique = max_clique(icgraph);
  for (const std::string& member : partition.clique) {
    int v = icgraph.index_of(member);
    std::set<int> neighborhood;
    for (int u : icgraph.neighbors(v)) neighborhood.insert(u);
    std::vector<std::string> subset{member};
    for (int u = 0; u < icgraph.vertex_count(); ++u) {
      if (u == v || neighborhood.count(u)) continue;
      subset.push_back(icgraph.vertices[static_cast<std::size_t>(u)]);
    }
    std::sort(subset.begin(), subset.end());
    partition.subsets.push_back({member, std::move(subset)});
  }
  return partition;
}

namespace {

struct BinaryPick {
  int positive;
  int negative;
};

BinaryPick binary_states(const Network& net, int var, int positive, const char* role) {
  if (net.cardinality(var) != 2) {
    fail(Errc::bad_argument,
         std::string(role) + " '" + net.var(var).name + "' must be binary");
  }
  int pos = positive < 0 ? 1 : positive;
  if (pos != 0 && pos != 1) {
    fail(Errc::bad_argument, "positive state index out of range");
  }
  return {pos, 1 - pos};
}

// Pr[child = positive | parents] with the given parent states.
double positive_prob(const Network& net, const FullCpt& cpt,
                     const std::map<int, int>& states, int child_positive) {
  std::vector<int> pstates;
  std::vector<int> pcards;
  pstates.reserve(cpt.parents.size());
  pcards.reserve(cpt.parents.size());
  for (int p : cpt.parents) {
    auto it = states.find(p);
    if (it == states.end()) {
      fail(Errc::bad_argument, "missing a state for parent '" + net.var(p).name + "'");
    }
    if (it->second < 0 || it->second >= net.cardinality(p)) {
      fail(Errc::unknown_state, "state index out of range for '" + net.var(p).name + "'");
    }
    pstates.push_back(it->second);
    pcards.push_back(net.cardinality(p));
  }
  std::int64_t row = config_row(pstates, pcards);
  return cpt.rows[static_cast<std::size_t>(row)][static_cast<std::size_t>(child_positive)];
}

std::map<int, int> with_pair(const std::map<int, int>& context, int a, int sa, int b, int sb) {
  std::map<int, int> states = context;
  states[a] = sa;
  states[b] = sb;
  return states;
}

void check_context(const Network& net, const FullCpt& cpt,
                   const std::vector<int>& designated, const std::map<int, int>& context) {
  for (const auto& [var, state] : context) {
    (void)state;
    if (std::find(cpt.parents.begin(), cpt.parents.end(), var) == cpt.parents.end()) {
      fail(Errc::bad_argument, "context variable '" + net.var(var).name + "' is not a parent");
    }
    if (std::find(designated.begin(), designated.end(), var) != designated.end()) {
      fail(Errc::bad_argument,
           "context assigns the designated predictor '" + net.var(var).name + "'");
    }
  }
}

}  // namespace

bool positive_influence(const Network& net, const FullCpt& cpt, int predictor,
                        const std::map<int, int>& context, int child_positive,
                        int predictor_positive) {
  BinaryPick y = binary_states(net, cpt.child, child_positive, "child");
  BinaryPick x = binary_states(net, predictor, predictor_positive, "predictor");
  check_context(net, cpt, {predictor}, context);

  std::map<int, int> hi = context;
  hi[predictor] = x.positive;
  std::map<int, int> lo = context;
  lo[predictor] = x.negative;
  return positive_prob(net, cpt, hi, y.positive) >= positive_prob(net, cpt, lo, y.positive);
}

bool positive_influence_all(const Network& net, const FullCpt& cpt, int predictor,
                            int child_positive, int predictor_positive) {
  std::vector<int> rest;
  std::vector<int> cards;
  for (int p : cpt.parents) {
    if (p == predictor) continue;
    rest.push_back(p);
    cards.push_back(net.cardinality(p));
  }
  std::int64_t configs = config_count(cards);
  for (std::int64_t r = 0; r < configs; ++r) {
    std::vector<int> states = row_config(r, cards);
    std::map<int, int> context;
    for (std::size_t i = 0; i < rest.size(); ++i) context[rest[i]] = states[i];
    if (!positive_influence(net, cpt, predictor, context, child_positive,
                            predictor_positive)) {
      return false;
    }
  }
  return true;
}

double additive_synergy(const Network& net, const FullCpt& cpt, int parent_a,
                        int parent_b, const std::map<int, int>& context,
                        int child_positive) {
  BinaryPick y = binary_states(net, cpt.child, child_positive, "child");
  BinaryPick a = binary_states(net, parent_a, -1, "predictor");
  BinaryPick b = binary_states(net, parent_b, -1, "predictor");
  check_context(net, cpt, {parent_a, parent_b}, context);

  double pp = positive_prob(net, cpt, with_pair(context, parent_a, a.positive, parent_b, b.positive), y.positive);
  double nn = positive_prob(net, cpt, with_pair(context, parent_a, a.negative, parent_b, b.negative), y.positive);
  double pn = positive_prob(net, cpt, with_pair(context, parent_a, a.positive, parent_b, b.negative), y.positive);
  double np = positive_prob(net, cpt, with_pair(context, parent_a, a.negative, parent_b, b.positive), y.positive);
  return pp + nn - pn - np;
}

double product_synergy(const Network& net, const FullCpt& cpt, int parent_a,
                       int parent_b, const std::map<int, int>& context,
                       int child_positive) {
  BinaryPick y = binary_states(net, cpt.child, child_positive, "child");
  BinaryPick a = binary_states(net, parent_a, -1, "predictor");
  BinaryPick b = binary_states(net, parent_b, -1, "predictor");
  check_context(net, cpt, {parent_a, parent_b}, context);

  double pp = positive_prob(net, cpt, with_pair(context, parent_a, a.positive, parent_b, b.positive), y.positive);
  double nn = positive_prob(net, cpt, with_pair(context, parent_a, a.negative, parent_b, b.negative), y.positive);
  double pn = positive_prob(net, cpt, with_pair(context, parent_a, a.positive, parent_b, b.negative), y.positive);
  double np = positive_prob(net, cpt, with_pair(context, parent_a, a.negative, parent_b, b.positive), y.positive);
  return pp * nn - pn * np;
}

}  // namespace abn

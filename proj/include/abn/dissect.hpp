#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "abn/infer.hpp"
#include "abn/model.hpp"

namespace abn {

// Network with `node`'s parents narrowed to one additive term's subset and
// its CPT replaced by that term's table. Arcs from the other parents vanish.
Network dissect_at(const Network& net, int node, int term_index);

struct DissectionNode {
  Network net;
  std::int64_t max_table = 0;  // largest clique table of net's triangulation
  int dissected = -1;          // variable id; -1 at a leaf
  std::vector<std::unique_ptr<DissectionNode>> children;  // one per term
  double weight = 1.0;         // cumulative product of term weights
  std::optional<JunctionTree> tree;  // leaves only

  bool is_leaf() const { return children.empty(); }
};

struct DissectionPlan {
  std::unique_ptr<DissectionNode> root;
  std::vector<const DissectionNode*> leaves;  // depth-first term order
};

// Greedy planner: repeatedly dissect the additive node in the largest clique
// whose dissection most reduces the maximum clique table size, and only when
// the reduction is strict. Leaves carry ready junction trees.
DissectionPlan build_plan(const Network& net);

// Dissects every additive node with at least two terms, regardless of clique
// sizes. Leaf networks then carry no additive nodes, so leaf evaluations are
// independent of the weights; the weight-posterior machinery relies on this.
DissectionPlan build_full_dissection(const Network& net);

enum class Combination { exact, naive };

struct AbnmResult {
  std::vector<double> distribution;
  double evidence_probability = 1.0;
  std::vector<double> leaf_likelihoods;
};

// Mixture combination over the plan's leaves. `exact` weights each leaf
// conditional by its evidence likelihood, which reproduces the effective-CPT
// joint; `naive` combines conditionals by prior weight alone (the two agree
// whenever all leaf likelihoods are equal, in particular with no evidence).
AbnmResult abnm_query(const DissectionPlan& plan, int query,
                      const Evidence& evidence,
                      Combination mode = Combination::exact);

}  // namespace abn

#pragma once

#include <map>
#include <string>
#include <vector>

#include "abn/graph.hpp"
#include "abn/model.hpp"

namespace abn {

// Parent subsets prescribed by an intercausal dependence graph: one subset
// S_i = {X_i} + (V minus neighbors of X_i) per member X_i of the maximum
// clique. A complete graph yields all singletons; an edgeless graph yields
// the single subset V.
struct Partition {
  std::vector<std::string> clique;
  std::vector<std::pair<std::string, std::vector<std::string>>> subsets;
};

Partition prescribe_partition(const UndirectedGraph& icgraph);

// Influence and synergy diagnostics on a full CPT with binary child (and
// binary predictors). Positive states default to the last-listed state of
// each variable; pass an explicit state index to override.

bool positive_influence(const Network& net, const FullCpt& cpt, int predictor,
                        const std::map<int, int>& context,
                        int child_positive = -1, int predictor_positive = -1);

// The all-contexts variant: positive influence in every configuration of the
// remaining parents.
bool positive_influence_all(const Network& net, const FullCpt& cpt, int predictor,
                            int child_positive = -1, int predictor_positive = -1);

// P(y+|a+b+c) + P(y+|a-b-c) - P(y+|a+b-c) - P(y+|a-b+c)
double additive_synergy(const Network& net, const FullCpt& cpt, int parent_a,
                        int parent_b, const std::map<int, int>& context,
                        int child_positive = -1);

// P(y+|a+b+c) * P(y+|a-b-c) - P(y+|a+b-c) * P(y+|a-b+c)
double product_synergy(const Network& net, const FullCpt& cpt, int parent_a,
                       int parent_b, const std::map<int, int>& context,
                       int child_positive = -1);

}  // namespace abn

#pragma once

#include <cstdint>
#include <vector>

#include "abn/infer.hpp"
#include "abn/model.hpp"

namespace abn {

// Weights of one additive node: nonnegative, summing to one.
using WeightVector = std::vector<double>;

// Exact joint over a node and its parents. Rows follow the node's CPT
// layout: one row per parent configuration, one column per child state,
// holding Pr[child, parents] (not conditionals).
struct FamilyMarginal {
  int node = -1;
  std::vector<int> parents;
  std::vector<std::vector<double>> rows;
};

FamilyMarginal family_marginal(const Network& net, int node);

struct CrossEntropy {
  double value = 0.0;    // +infinity when the approximation has a hard zero
  bool diverged = false;
};

// Kullback-Leibler divergence between the two full joints, in nats.
// Networks must share variables and parent sets.
CrossEntropy cross_entropy_total(const Network& reference, const Network& abnm,
                                 std::int64_t cap = kDefaultEnumCap);

// Per-node fitting problem: the family marginal, the reference conditional,
// and each term's conditional, all expanded over full parent configurations.
struct NodeFitProblem {
  int states = 0;                               // child cardinality
  std::vector<double> family;                   // Pr[x, pi], config-major
  std::vector<double> reference;                // Pr[x | pi]
  std::vector<std::vector<double>> terms;       // terms[j]: Pr[x | S_j]
};

NodeFitProblem make_fit_problem(const Network& net, const FamilyMarginal& family,
                                const FullCpt& reference, const AdditiveCpt& terms);

CrossEntropy node_cross_entropy(const NodeFitProblem& problem, const WeightVector& weights);

// Components j = 1..k-1 of the simplex-reduced stationarity condition,
// sum Pr[x,pi] (Pr[x|S_j] - Pr[x|S_k]) / sum_l a_l Pr[x|S_l]. This is the
// negative of the reduced gradient of node_cross_entropy. Weights must be
// strictly interior.
std::vector<double> stationarity_residual(const NodeFitProblem& problem,
                                          const WeightVector& weights);

struct FitResult {
  WeightVector weights;
  double cross_entropy = 0.0;
  bool non_identifiable = false;
  bool diverged = false;
  bool interior = false;
  double residual_norm = 0.0;  // max-norm of the stationarity residual (interior only)
};

// Global minimum of node_cross_entropy over the weight simplex. Convex, so
// golden section (k = 2) or projected gradient (k > 2) plus a Newton polish
// reaches it; interior optima end with residual norm at most 1e-6.
FitResult optimize_weights(const NodeFitProblem& problem);

// Discretized distribution over one node's weight vector.
struct WeightPosterior {
  std::vector<WeightVector> grid;
  std::vector<double> mass;
  double step = 0.0;
};

WeightPosterior uniform_posterior(int k, double step);

// Bayes update: posterior mass at each grid point is the prior mass times
// the evidence likelihood with that weight vector installed at `node`,
// renormalized. Likelihoods come from the full-dissection mixture, so each
// case costs one clique-tree calibration per leaf regardless of grid size.
WeightPosterior bayes_update_weights(const WeightPosterior& prior, const Network& abnm,
                                     int node, const Evidence& observation);
WeightPosterior bayes_update_weights(const WeightPosterior& prior, const Network& abnm,
                                     int node, const std::vector<Evidence>& observations);

struct PosteriorSummary {
  WeightVector mean;
  WeightVector mode;
  double interval_low = 0.0;   // central 95% interval of the first weight
  double interval_high = 1.0;
};

PosteriorSummary summarize_posterior(const WeightPosterior& posterior);

// Term table for `subset` obtained from the full model by conditional
// weighting over the removed parents: Pr[x|S] = sum_R Pr[x|S,R] Pr[R|S].
// Rows whose subset configuration has zero probability fall back to uniform
// weighting over R and are flagged.
struct MarginalizedCpt {
  std::vector<int> given;
  std::vector<std::vector<double>> rows;
  std::vector<std::int64_t> uniform_rows;  // rows that used the fallback
};

MarginalizedCpt marginalize_cpt(const Network& net, int node, const std::vector<int>& subset);

// Laplace-smoothed counting: (count(x, s) + pseudocount) over
// (count(s) + pseudocount * d). Cases missing any family variable are
// skipped and counted in `skipped_cases`.
struct InducedCpt {
  std::vector<int> given;
  std::vector<std::vector<double>> rows;
  std::int64_t skipped_cases = 0;
  std::vector<std::int64_t> unobserved_rows;
};

InducedCpt induce_cpt(const CaseSet& cases, const Network& net, int node,
                      const std::vector<int>& subset, double pseudocount = 1.0);

}  // namespace abn

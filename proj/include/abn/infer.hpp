#pragma once

#include <cstdint>
#include <vector>

#include "abn/junction.hpp"
#include "abn/model.hpp"

namespace abn {

inline constexpr std::int64_t kDefaultEnumCap = std::int64_t{1} << 22;

// Full joint distribution, one entry per instantiation. Variable order is
// declaration order; the last variable varies fastest.
struct JointTable {
  std::vector<int> vars;
  std::vector<double> values;
};

// Brute-force expansion of the joint. The oracle path: everything else in
// the engine is tested against it.
JointTable enumerate_joint(const Network& net, std::int64_t cap = kDefaultEnumCap);

struct QueryResult {
  std::vector<double> distribution;
  double evidence_probability = 1.0;
};

QueryResult query_by_enumeration(const Network& net, int query,
                                 const Evidence& evidence,
                                 std::int64_t cap = kDefaultEnumCap);

struct CalibratedTree {
  JunctionTree tree;                // potentials hold clique marginals
  std::vector<Table> sep_tables;    // aligned with tree.edges
  double evidence_likelihood = 1.0;
};

// Two-phase clique-tree propagation with evidence entered by zeroing
// inconsistent potential entries. Throws Errc::impossible_evidence when the
// evidence has zero mass.
CalibratedTree ls_calibrate(const Network& net, const Evidence& evidence);
CalibratedTree ls_calibrate(const JunctionTree& base, const Evidence& evidence);

// Non-throwing variant used by the mixture combiner: a zero-likelihood
// result carries evidence_likelihood == 0 and unspecified tables.
CalibratedTree ls_calibrate_unchecked(const JunctionTree& base, const Evidence& evidence);

// Marginal of one variable from any clique containing it.
std::vector<double> ls_marginal(const CalibratedTree& tree, int var);

}  // namespace abn

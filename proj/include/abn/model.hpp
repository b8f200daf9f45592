#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <variant>
#include <vector>

namespace abn {

// One discrete variable. State order is significant: CPT columns follow it,
// and the last-listed state is the default positive direction for the
// influence diagnostics.
struct Variable {
  std::string name;
  std::vector<std::string> states;

  int cardinality() const { return static_cast<int>(states.size()); }
  int state_index(const std::string& label) const;  // -1 when absent
};

// Conditional probability table over all parent configurations. Rows are
// ordered with the first-listed parent most significant (the last parent
// varies fastest); each row is a distribution over the child's states.
struct FullCpt {
  int child = -1;
  std::vector<int> parents;
  std::vector<std::vector<double>> rows;
};

// One summand of an additive decomposition: a conditional table over a
// subset of the child's parents. Row layout follows the order of `given`.
struct AdditiveTerm {
  double weight = 0.0;
  std::vector<int> given;
  std::vector<std::vector<double>> rows;
};

struct AdditiveCpt {
  int child = -1;
  std::vector<int> parents;
  std::vector<AdditiveTerm> terms;
};

using NodeCpt = std::variant<FullCpt, AdditiveCpt>;

struct Network {
  std::vector<Variable> variables;
  std::vector<NodeCpt> nodes;  // nodes[i] belongs to variables[i]
  std::string description;

  int variable_index(const std::string& name) const;  // -1 when absent
  int require_variable(const std::string& name) const;
  const Variable& var(int id) const { return variables[static_cast<std::size_t>(id)]; }
  int cardinality(int id) const { return var(id).cardinality(); }
  const std::vector<int>& parents_of(int id) const;
  bool is_additive(int id) const;
  std::vector<int> family_of(int id) const;    // {id} and parents, ascending
  std::vector<int> topological_order() const;  // throws Errc::cycle
  int node_count() const { return static_cast<int>(variables.size()); }
};

struct Evidence {
  std::map<int, int> assignments;  // variable id -> state index
  bool empty() const { return assignments.empty(); }
};

struct CaseSet {
  static constexpr int kMissing = -1;
  std::vector<int> columns;            // variable ids
  std::vector<std::vector<int>> rows;  // state indices, kMissing when absent
};

// Mixed-radix helpers shared by CPT rows, potential tables and enumeration.
// The first position is most significant; the last varies fastest.
std::int64_t config_count(const std::vector<int>& cards);
std::int64_t config_row(const std::vector<int>& states, const std::vector<int>& cards);
std::vector<int> row_config(std::int64_t row, const std::vector<int>& cards);

// Renormalizes rows and term weights whose sums are off by text-format
// round-off (more than 1e-15 but within 1e-9). Larger deviations are left
// for validate_network to reject.
void normalize_probabilities(Network& net);

// Checks every type invariant (unique names, cardinalities, acyclicity,
// row shapes and sums, weight sums, subset unions). Throws abn::Error with
// a distinct code per violation.
void validate_network(const Network& net);

FullCpt effective_cpt(const Network& net, int node);
FullCpt effective_cpt(const Network& net, const std::string& node);

// Copy of the network with every additive node expanded to its effective CPT.
Network expand_to_full(const Network& net);

std::int64_t data_requirement(const std::vector<int>& cardinalities,
                              std::int64_t cases_per_config = 10);

}  // namespace abn

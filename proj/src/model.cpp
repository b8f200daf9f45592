#include "abn/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <deque>
#include <set>
#include <sstream>

#include "abn/errors.hpp"

namespace abn {

const char* errc_name(Errc code) {
  switch (code) {
    case Errc::syntax: return "syntax";
    case Errc::cycle: return "cycle";
    case Errc::row_sum: return "row-sum";
    case Errc::weight_sum: return "weight-sum";
    case Errc::subset_union: return "subset-union";
    case Errc::dangling_reference: return "dangling-reference";
    case Errc::unknown_variable: return "unknown-variable";
    case Errc::unknown_state: return "unknown-state";
    case Errc::size_limit: return "size-limit";
    case Errc::impossible_evidence: return "impossible-evidence";
    case Errc::boundary_weights: return "boundary-weights";
    case Errc::not_chordal: return "not-chordal";
    case Errc::bad_argument: return "bad-argument";
    case Errc::internal: return "internal";
  }
  return "unknown";
}

void fail(Errc code, const std::string& what) {
  throw Error(code, std::string(errc_name(code)) + ": " + what);
}

int Variable::state_index(const std::string& label) const {
  for (std::size_t i = 0; i < states.size(); ++i) {
    if (states[i] == label) return static_cast<int>(i);
  }
  return -1;
}

int Network::variable_index(const std::string& name) const {
  for (std::size_t i = 0; i < variables.size(); ++i) {
    if (variables[i].name == name) return static_cast<int>(i);
  }
  return -1;
}

int Network::require_variable(const std::string& name) const {
  int id = variable_index(name);
  if (id < 0) fail(Errc::unknown_variable, "no variable named '" + name + "'");
  return id;
}

const std::vector<int>& Network::parents_of(int id) const {
  const NodeCpt& cpt = nodes[static_cast<std::size_t>(id)];
  if (const auto* full = std::get_if<FullCpt>(&cpt)) return full->parents;
  return std::get<AdditiveCpt>(cpt).parents;
}

bool Network::is_additive(int id) const {
  return std::holds_alternative<AdditiveCpt>(nodes[static_cast<std::size_t>(id)]);
}

std::vector<int> Network::family_of(int id) const {
  std::vector<int> fam = parents_of(id);
  fam.push_back(id);
  std::sort(fam.begin(), fam.end());
  return fam;
}

std::vector<int> Network::topological_order() const {
  int n = node_count();
  std::vector<int> pending(static_cast<std::size_t>(n), 0);
  std::vector<std::vector<int>> children(static_cast<std::size_t>(n));
  for (int v = 0; v < n; ++v) {
    for (int p : parents_of(v)) {
      children[static_cast<std::size_t>(p)].push_back(v);
      ++pending[static_cast<std::size_t>(v)];
    }
  }
  std::deque<int> ready;
  for (int v = 0; v < n; ++v) {
    if (pending[static_cast<std::size_t>(v)] == 0) ready.push_back(v);
  }
  std::vector<int> order;
  order.reserve(static_cast<std::size_t>(n));
  while (!ready.empty()) {
    int v = ready.front();
    ready.pop_front();
    order.push_back(v);
    for (int c : children[static_cast<std::size_t>(v)]) {
      if (--pending[static_cast<std::size_t>(c)] == 0) ready.push_back(c);
    }
  }
  if (static_cast<int>(order.size()) != n) {
    fail(Errc::cycle, "parent lists contain a directed cycle");
  }
  return order;
}

std::int64_t config_count(const std::vector<int>& cards) {
  std::int64_t count = 1;
  for (int c : cards) {
    if (count > (std::int64_t{1} << 62) / std::max(c, 1)) {
      fail(Errc::size_limit, "configuration count overflows");
    }
    count *= c;
  }
  return count;
}

std::int64_t config_row(const std::vector<int>& states, const std::vector<int>& cards) {
  std::int64_t row = 0;
  for (std::size_t i = 0; i < cards.size(); ++i) {
    row = row * cards[i] + states[i];
  }
  return row;
}

std::vector<int> row_config(std::int64_t row, const std::vector<int>& cards) {
  std::vector<int> states(cards.size(), 0);
  for (std::size_t i = cards.size(); i-- > 0;) {
    states[i] = static_cast<int>(row % cards[i]);
    row /= cards[i];
  }
  return states;
}

namespace {

constexpr double kExactSumTol = 1e-15;
constexpr double kSumTol = 1e-9;

void renormalize_row(std::vector<double>& row) {
  double sum = 0.0;
  for (double v : row) sum += v;
  if (std::abs(sum - 1.0) <= kExactSumTol || sum <= 0.0) return;
  if (std::abs(sum - 1.0) > kSumTol) return;  // validate_network reports it
  for (double& v : row) v /= sum;
}

std::vector<int> parent_cards(const Network& net, const std::vector<int>& parents) {
  std::vector<int> cards;
  cards.reserve(parents.size());
  for (int p : parents) cards.push_back(net.cardinality(p));
  return cards;
}

void check_rows(const Network& net, const std::string& where, int child,
                const std::vector<int>& given,
                const std::vector<std::vector<double>>& rows) {
  std::int64_t expected = config_count(parent_cards(net, given));
  if (static_cast<std::int64_t>(rows.size()) != expected) {
    std::ostringstream msg;
    msg << where << ": expected " << expected << " rows, found " << rows.size();
    fail(Errc::syntax, msg.str());
  }
  int d = net.cardinality(child);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (static_cast<int>(rows[r].size()) != d) {
      std::ostringstream msg;
      msg << where << ", row " << r << ": expected " << d << " entries, found "
          << rows[r].size();
      fail(Errc::syntax, msg.str());
    }
    double sum = 0.0;
    for (double v : rows[r]) {
      if (!(v >= 0.0 && v <= 1.0 + kSumTol)) {
        std::ostringstream msg;
        msg << where << ", row " << r << ": entry outside [0, 1]";
        fail(Errc::row_sum, msg.str());
      }
      sum += v;
    }
    if (std::abs(sum - 1.0) > kSumTol) {
      std::ostringstream msg;
      msg << where << ", row " << r << ": probabilities sum to " << sum;
      fail(Errc::row_sum, msg.str());
    }
  }
}

}  // namespace

void normalize_probabilities(Network& net) {
  for (NodeCpt& cpt : net.nodes) {
    if (auto* full = std::get_if<FullCpt>(&cpt)) {
      for (auto& row : full->rows) renormalize_row(row);
    } else {
      auto& add = std::get<AdditiveCpt>(cpt);
      double wsum = 0.0;
      for (const AdditiveTerm& t : add.terms) wsum += t.weight;
      if (std::abs(wsum - 1.0) > kExactSumTol && std::abs(wsum - 1.0) <= kSumTol &&
          wsum > 0.0) {
        for (AdditiveTerm& t : add.terms) t.weight /= wsum;
      }
      for (AdditiveTerm& t : add.terms) {
        for (auto& row : t.rows) renormalize_row(row);
      }
    }
  }
}

void validate_network(const Network& net) {
  std::set<std::string> names;
  for (const Variable& v : net.variables) {
    if (!names.insert(v.name).second) {
      fail(Errc::syntax, "duplicate variable name '" + v.name + "'");
    }
    if (v.cardinality() < 2) {
      fail(Errc::syntax, "variable '" + v.name + "' needs at least two states");
    }
    std::set<std::string> labels(v.states.begin(), v.states.end());
    if (labels.size() != v.states.size()) {
      fail(Errc::syntax, "variable '" + v.name + "' has duplicate state labels");
    }
  }
  if (net.nodes.size() != net.variables.size()) {
    fail(Errc::syntax, "every variable needs exactly one node entry");
  }

  int n = net.node_count();
  for (int id = 0; id < n; ++id) {
    const std::string& name = net.var(id).name;
    const std::vector<int>& parents = net.parents_of(id);
    std::set<int> seen;
    for (int p : parents) {
      if (p < 0 || p >= n) {
        fail(Errc::dangling_reference, "node '" + name + "' has an unresolved parent");
      }
      if (p == id || !seen.insert(p).second) {
        fail(Errc::syntax, "node '" + name + "' repeats a parent or lists itself");
      }
    }

    const NodeCpt& cpt = net.nodes[static_cast<std::size_t>(id)];
    if (const auto* full = std::get_if<FullCpt>(&cpt)) {
      check_rows(net, "node '" + name + "'", id, full->parents, full->rows);
    } else {
      const auto& add = std::get<AdditiveCpt>(cpt);
      if (add.terms.empty()) {
        fail(Errc::syntax, "additive node '" + name + "' needs at least one term");
      }
      double wsum = 0.0;
      std::set<int> covered;
      for (std::size_t t = 0; t < add.terms.size(); ++t) {
        const AdditiveTerm& term = add.terms[t];
        if (term.weight < -kSumTol || term.weight > 1.0 + kSumTol) {
          fail(Errc::weight_sum, "node '" + name + "': term weight outside [0, 1]");
        }
        wsum += term.weight;
        std::set<int> in_term;
        for (int g : term.given) {
          if (std::find(parents.begin(), parents.end(), g) == parents.end()) {
            fail(Errc::dangling_reference,
                 "node '" + name + "': term conditions on a non-parent");
          }
          if (!in_term.insert(g).second) {
            fail(Errc::syntax, "node '" + name + "': term repeats a parent");
          }
          covered.insert(g);
        }
        std::ostringstream where;
        where << "node '" << name << "', term " << t;
        check_rows(net, where.str(), id, term.given, term.rows);
      }
      if (std::abs(wsum - 1.0) > kSumTol) {
        std::ostringstream msg;
        msg << "node '" << name << "': term weights sum to " << wsum;
        fail(Errc::weight_sum, msg.str());
      }
      if (covered.size() != parents.size()) {
        fail(Errc::subset_union,
             "node '" + name + "': term subsets do not cover the parent set");
      }
    }
  }

  net.topological_order();  // throws Errc::cycle
}

FullCpt effective_cpt(const Network& net, int node) {
  const NodeCpt& cpt = net.nodes.at(static_cast<std::size_t>(node));
  if (const auto* full = std::get_if<FullCpt>(&cpt)) return *full;

  const auto& add = std::get<AdditiveCpt>(cpt);
  FullCpt out;
  out.child = add.child;
  out.parents = add.parents;
  std::vector<int> cards = parent_cards(net, add.parents);
  int d = net.cardinality(node);
  std::int64_t count = config_count(cards);
  out.rows.assign(static_cast<std::size_t>(count),
                  std::vector<double>(static_cast<std::size_t>(d), 0.0));

  // Positions of each term's conditioning set within the full parent list.
  std::vector<std::vector<int>> positions(add.terms.size());
  std::vector<std::vector<int>> sub_cards(add.terms.size());
  for (std::size_t t = 0; t < add.terms.size(); ++t) {
    for (int g : add.terms[t].given) {
      auto it = std::find(add.parents.begin(), add.parents.end(), g);
      positions[t].push_back(static_cast<int>(it - add.parents.begin()));
      sub_cards[t].push_back(net.cardinality(g));
    }
  }

  std::vector<int> states;
  for (std::int64_t r = 0; r < count; ++r) {
    states = row_config(r, cards);
    for (std::size_t t = 0; t < add.terms.size(); ++t) {
      std::int64_t sub = 0;
      for (std::size_t i = 0; i < positions[t].size(); ++i) {
        sub = sub * sub_cards[t][i] + states[static_cast<std::size_t>(positions[t][i])];
      }
      const std::vector<double>& row = add.terms[t].rows[static_cast<std::size_t>(sub)];
      double w = add.terms[t].weight;
      for (int y = 0; y < d; ++y) {
        out.rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(y)] += w * row[static_cast<std::size_t>(y)];
      }
    }
  }
  return out;
}

FullCpt effective_cpt(const Network& net, const std::string& node) {
  return effective_cpt(net, net.require_variable(node));
}

Network expand_to_full(const Network& net) {
  Network out = net;
  for (int id = 0; id < net.node_count(); ++id) {
    if (net.is_additive(id)) {
      out.nodes[static_cast<std::size_t>(id)] = effective_cpt(net, id);
    }
  }
  return out;
}

std::int64_t data_requirement(const std::vector<int>& cardinalities,
                              std::int64_t cases_per_config) {
  if (cases_per_config <= 0) {
    fail(Errc::bad_argument, "cases_per_config must be positive");
  }
  for (int c : cardinalities) {
    if (c < 2) fail(Errc::bad_argument, "cardinalities must be at least 2");
  }
  std::int64_t configs = config_count(cardinalities);
  if (configs > (std::int64_t{1} << 62) / cases_per_config) {
    fail(Errc::size_limit, "case requirement overflows");
  }
  return cases_per_config * configs;
}

}  // namespace abn

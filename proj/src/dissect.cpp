#include "abn/dissect.hpp"

#include <algorithm>
#include <sstream>

#include "abn/errors.hpp"
#include "abn/graph.hpp"

namespace abn {

Network dissect_at(const Network& net, int node, int term_index) {
  const NodeCpt& cpt = net.nodes.at(static_cast<std::size_t>(node));
  const auto* add = std::get_if<AdditiveCpt>(&cpt);
  if (add == nullptr) {
    fail(Errc::bad_argument, "node '" + net.var(node).name + "' is not additive");
  }
  if (term_index < 0 || term_index >= static_cast<int>(add->terms.size())) {
    std::ostringstream msg;
    msg << "term index " << term_index << " out of range for node '"
        << net.var(node).name << "'";
    fail(Errc::bad_argument, msg.str());
  }
  const AdditiveTerm& term = add->terms[static_cast<std::size_t>(term_index)];
  Network out = net;
  FullCpt full;
  full.child = node;
  full.parents = term.given;
  full.rows = term.rows;
  out.nodes[static_cast<std::size_t>(node)] = std::move(full);
  return out;
}

namespace {

std::int64_t max_clique_table(const Network& net) {
  UndirectedGraph moral = moralize(net);
  std::vector<std::int64_t> cards;
  cards.reserve(moral.vertices.size());
  for (const std::string& name : moral.vertices) {
    cards.push_back(net.cardinality(net.require_variable(name)));
  }
  Triangulation tri = triangulate(moral, cards);
  std::int64_t best = 1;
  for (const auto& clique : maximal_cliques(tri.graph, tri.order)) {
    best = std::max(best, table_size(clique, net));
  }
  return best;
}

// Additive nodes (with a real choice of terms) inside the deterministically
// chosen largest clique.
std::vector<int> dissection_candidates(const Network& net) {
  UndirectedGraph moral = moralize(net);
  std::vector<std::int64_t> cards;
  cards.reserve(moral.vertices.size());
  for (const std::string& name : moral.vertices) {
    cards.push_back(net.cardinality(net.require_variable(name)));
  }
  Triangulation tri = triangulate(moral, cards);
  std::vector<std::vector<std::string>> cliques = maximal_cliques(tri.graph, tri.order);

  const std::vector<std::string>* largest = nullptr;
  std::int64_t largest_size = -1;
  for (const auto& clique : cliques) {
    std::int64_t size = table_size(clique, net);
    if (size > largest_size) {
      largest = &clique;
      largest_size = size;
    }
  }
  std::vector<int> out;
  if (largest == nullptr) return out;
  for (const std::string& name : *largest) {
    int id = net.require_variable(name);
    if (!net.is_additive(id)) continue;
    if (std::get<AdditiveCpt>(net.nodes[static_cast<std::size_t>(id)]).terms.size() < 2) continue;
    out.push_back(id);
  }
  std::sort(out.begin(), out.end(), [&](int a, int b) {
    return net.var(a).name < net.var(b).name;
  });
  return out;
}

void grow(DissectionNode* node, bool greedy, DissectionPlan& plan) {
  node->max_table = max_clique_table(node->net);

  std::vector<int> candidates;
  if (greedy) {
    candidates = dissection_candidates(node->net);
  } else {
    for (int id = 0; id < node->net.node_count(); ++id) {
      if (node->net.is_additive(id) &&
          std::get<AdditiveCpt>(node->net.nodes[static_cast<std::size_t>(id)]).terms.size() >= 2) {
        candidates.push_back(id);
      }
    }
    std::sort(candidates.begin(), candidates.end(), [&](int a, int b) {
      return node->net.var(a).name < node->net.var(b).name;
    });
  }

  int chosen = -1;
  std::vector<Network> parts;
  if (!candidates.empty()) {
    if (greedy) {
      std::int64_t best_result = node->max_table;
      for (int id : candidates) {
        const auto& add = std::get<AdditiveCpt>(node->net.nodes[static_cast<std::size_t>(id)]);
        std::int64_t result = 0;
        std::vector<Network> trial;
        for (int t = 0; t < static_cast<int>(add.terms.size()); ++t) {
          trial.push_back(dissect_at(node->net, id, t));
          result = std::max(result, max_clique_table(trial.back()));
        }
        // Strict reduction only; candidates arrive in name order, so the
        // first best is the lexicographic winner.
        if (result < best_result) {
          best_result = result;
          chosen = id;
          parts = std::move(trial);
        }
      }
    } else {
      chosen = candidates.front();
      const auto& add = std::get<AdditiveCpt>(node->net.nodes[static_cast<std::size_t>(chosen)]);
      for (int t = 0; t < static_cast<int>(add.terms.size()); ++t) {
        parts.push_back(dissect_at(node->net, chosen, t));
      }
    }
  }

  if (chosen < 0) {
    node->tree = build_junction_tree(node->net);
    node->max_table = node->tree->max_table_size;
    plan.leaves.push_back(node);
    return;
  }

  node->dissected = chosen;
  const auto& add = std::get<AdditiveCpt>(node->net.nodes[static_cast<std::size_t>(chosen)]);
  for (std::size_t t = 0; t < parts.size(); ++t) {
    auto child = std::make_unique<DissectionNode>();
    child->net = std::move(parts[t]);
    child->weight = node->weight * add.terms[t].weight;
    grow(child.get(), greedy, plan);
    node->children.push_back(std::move(child));
  }
}

DissectionPlan build(const Network& net, bool greedy) {
  DissectionPlan plan;
  plan.root = std::make_unique<DissectionNode>();
  plan.root->net = net;
  plan.root->weight = 1.0;
  grow(plan.root.get(), greedy, plan);
  return plan;
}

}  // namespace

DissectionPlan build_plan(const Network& net) { return build(net, true); }

DissectionPlan build_full_dissection(const Network& net) { return build(net, false); }

AbnmResult abnm_query(const DissectionPlan& plan, int query,
                      const Evidence& evidence, Combination mode) {
  const Network& net = plan.root->net;
  if (query < 0 || query >= net.node_count()) {
    fail(Errc::unknown_variable, "query variable out of range");
  }
  int d = net.cardinality(query);

  AbnmResult result;
  result.distribution.assign(static_cast<std::size_t>(d), 0.0);
  result.leaf_likelihoods.reserve(plan.leaves.size());

  double weighted_mass = 0.0;    // sum_i w_i L_i
  double surviving_weight = 0.0; // sum of w_i over leaves with L_i > 0
  std::vector<std::vector<double>> marginals;
  std::vector<double> weights;
  for (const DissectionNode* leaf : plan.leaves) {
    CalibratedTree calibrated = ls_calibrate_unchecked(*leaf->tree, evidence);
    double likelihood = calibrated.evidence_likelihood;
    result.leaf_likelihoods.push_back(likelihood);
    weighted_mass += leaf->weight * likelihood;
    if (likelihood > 0.0) {
      surviving_weight += leaf->weight;
      marginals.push_back(ls_marginal(calibrated, query));
      weights.push_back(leaf->weight);
    } else {
      marginals.emplace_back();
      weights.push_back(leaf->weight);
    }
  }
  if (weighted_mass <= 0.0) {
    fail(Errc::impossible_evidence, "evidence has zero probability in every subnetwork");
  }
  result.evidence_probability = weighted_mass;

  for (std::size_t i = 0; i < plan.leaves.size(); ++i) {
    if (result.leaf_likelihoods[i] <= 0.0) continue;
    double coefficient = mode == Combination::exact
                             ? weights[i] * result.leaf_likelihoods[i] / weighted_mass
                             : weights[i] / surviving_weight;
    for (int y = 0; y < d; ++y) {
      result.distribution[static_cast<std::size_t>(y)] +=
          coefficient * marginals[i][static_cast<std::size_t>(y)];
    }
  }
  return result;
}

}  // namespace abn

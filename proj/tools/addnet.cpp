// addnet: command-line front end for additive belief networks. Subcommands
// cover validation, inference, dissection planning, partition prescription,
// weight fitting, cross-entropy reports and Bayesian weight updates.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "abn/decompose.hpp"
#include "abn/dissect.hpp"
#include "abn/errors.hpp"
#include "abn/fit.hpp"
#include "abn/format.hpp"
#include "abn/graph.hpp"
#include "abn/infer.hpp"
#include "abn/model.hpp"

using nlohmann::ordered_json;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in.good()) abn::fail(abn::Errc::bad_argument, "cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::int64_t enum_cap() {
  const char* env = std::getenv("ADDNET_ENUM_CAP");
  if (env == nullptr) return abn::kDefaultEnumCap;
  char* end = nullptr;
  long long cap = std::strtoll(env, &end, 10);
  if (end == env || cap <= 0) {
    abn::fail(abn::Errc::bad_argument, "ADDNET_ENUM_CAP must be a positive integer");
  }
  return cap;
}

// All reported numbers are rounded to nine significant digits so repeated
// runs (and golden files) are byte-identical.
double sig9(double v) {
  if (!std::isfinite(v)) return v;
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return std::strtod(buf, nullptr);
}

ordered_json num_list(const std::vector<double>& values) {
  ordered_json out = ordered_json::array();
  for (double v : values) out.push_back(sig9(v));
  return out;
}

std::string fmt9(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

abn::Evidence parse_evidence(const abn::Network& net, const std::vector<std::string>& specs) {
  abn::Evidence evidence;
  for (const std::string& spec : specs) {
    std::istringstream in(spec);
    std::string item;
    while (std::getline(in, item, ',')) {
      if (item.empty()) continue;
      std::size_t eq = item.find('=');
      if (eq == std::string::npos) {
        abn::fail(abn::Errc::bad_argument, "evidence must look like VAR=STATE: '" + item + "'");
      }
      int var = net.require_variable(item.substr(0, eq));
      int state = net.var(var).state_index(item.substr(eq + 1));
      if (state < 0) {
        abn::fail(abn::Errc::unknown_state,
                  "'" + item.substr(eq + 1) + "' is not a state of " + net.var(var).name);
      }
      if (evidence.assignments.count(var)) {
        abn::fail(abn::Errc::bad_argument, "evidence assigns '" + net.var(var).name + "' twice");
      }
      evidence.assignments[var] = state;
    }
  }
  return evidence;
}

ordered_json evidence_json(const abn::Network& net, const abn::Evidence& evidence) {
  ordered_json out = ordered_json::object();
  for (const auto& [var, state] : evidence.assignments) {
    out[net.var(var).name] = net.var(var).states[static_cast<std::size_t>(state)];
  }
  return out;
}

void emit(const ordered_json& doc) { std::cout << doc.dump(2) << "\n"; }

// ---------------------------------------------------------------- infer ----

struct InferOptions {
  std::string network;
  std::string query;
  std::vector<std::string> evidence;
  std::string method = "abnm";
  std::string combination = "exact";
  bool json = false;
};

int run_infer(const InferOptions& opt) {
  abn::Network net = abn::parse_network(read_file(opt.network));
  int query = net.require_variable(opt.query);
  abn::Evidence evidence = parse_evidence(net, opt.evidence);

  std::vector<double> distribution;
  std::vector<double> alternative;
  double likelihood = 1.0;
  std::vector<double> leaf_weights;
  std::vector<double> leaf_likelihoods;

  if (opt.method == "enum") {
    abn::QueryResult result = abn::query_by_enumeration(net, query, evidence, enum_cap());
    distribution = result.distribution;
    likelihood = result.evidence_probability;
  } else if (opt.method == "ls") {
    abn::CalibratedTree tree = abn::ls_calibrate(net, evidence);
    distribution = abn::ls_marginal(tree, query);
    likelihood = tree.evidence_likelihood;
  } else if (opt.method == "abnm") {
    abn::DissectionPlan plan = abn::build_plan(net);
    abn::AbnmResult exact = abn::abnm_query(plan, query, evidence, abn::Combination::exact);
    abn::AbnmResult naive = abn::abnm_query(plan, query, evidence, abn::Combination::naive);
    likelihood = exact.evidence_probability;
    const abn::AbnmResult& primary = opt.combination == "naive" ? naive : exact;
    const abn::AbnmResult& secondary = opt.combination == "naive" ? exact : naive;
    distribution = primary.distribution;
    double gap = 0.0;
    for (std::size_t i = 0; i < distribution.size(); ++i) {
      gap = std::max(gap, std::abs(exact.distribution[i] - naive.distribution[i]));
    }
    if (gap > 1e-9) alternative = secondary.distribution;
    for (const abn::DissectionNode* leaf : plan.leaves) leaf_weights.push_back(leaf->weight);
    leaf_likelihoods = exact.leaf_likelihoods;
  } else {
    abn::fail(abn::Errc::bad_argument, "method must be abnm, ls or enum");
  }

  const abn::Variable& qv = net.var(query);
  if (opt.json) {
    ordered_json doc;
    doc["command"] = "infer";
    doc["query"] = qv.name;
    doc["method"] = opt.method;
    if (opt.method == "abnm") doc["combination"] = opt.combination;
    doc["evidence"] = evidence_json(net, evidence);
    doc["states"] = qv.states;
    doc["distribution"] = num_list(distribution);
    doc["evidence_probability"] = sig9(likelihood);
    if (opt.method == "abnm") {
      doc["leaf_count"] = leaf_weights.size();
      doc["leaf_weights"] = num_list(leaf_weights);
      doc["leaf_likelihoods"] = num_list(leaf_likelihoods);
      if (!alternative.empty()) {
        doc[opt.combination == "naive" ? "exact_distribution" : "naive_distribution"] =
            num_list(alternative);
      }
    }
    emit(doc);
  } else {
    std::cout << "method: " << opt.method;
    if (opt.method == "abnm") std::cout << " (" << opt.combination << " combination)";
    std::cout << "\nPr[evidence] = " << fmt9(likelihood) << "\n";
    if (!leaf_weights.empty()) {
      std::cout << "leaves: " << leaf_weights.size() << ", weights";
      for (double w : leaf_weights) std::cout << " " << fmt9(w);
      std::cout << "\n";
    }
    std::cout << qv.name << ":\n";
    for (std::size_t s = 0; s < qv.states.size(); ++s) {
      std::cout << "  " << qv.states[s] << "  " << fmt9(distribution[s]) << "\n";
    }
    if (!alternative.empty()) {
      std::cout << (opt.combination == "naive" ? "exact" : "naive") << " combination differs:\n";
      for (std::size_t s = 0; s < qv.states.size(); ++s) {
        std::cout << "  " << qv.states[s] << "  " << fmt9(alternative[s]) << "\n";
      }
    }
  }
  return 0;
}

// ----------------------------------------------------------------- plan ----

ordered_json clique_names(const abn::Network& net, const std::vector<int>& clique) {
  ordered_json out = ordered_json::array();
  for (int v : clique) out.push_back(net.var(v).name);
  return out;
}

void collect_steps(const abn::DissectionNode* node, const abn::Network& net,
                   ordered_json& steps) {
  if (node->is_leaf()) return;
  const auto& add = std::get<abn::AdditiveCpt>(
      node->net.nodes[static_cast<std::size_t>(node->dissected)]);
  std::int64_t after = 0;
  for (const auto& child : node->children) after = std::max(after, child->max_table);
  ordered_json step;
  step["node"] = net.var(node->dissected).name;
  step["before"] = node->max_table;
  step["after"] = after;
  ordered_json subsets = ordered_json::array();
  ordered_json weights = ordered_json::array();
  for (const auto& term : add.terms) {
    ordered_json names = ordered_json::array();
    for (int g : term.given) names.push_back(net.var(g).name);
    subsets.push_back(std::move(names));
    weights.push_back(sig9(term.weight));
  }
  step["subsets"] = std::move(subsets);
  step["weights"] = std::move(weights);
  steps.push_back(std::move(step));
  for (const auto& child : node->children) collect_steps(child.get(), net, steps);
}

int run_plan(const std::string& network, bool json) {
  abn::Network net = abn::parse_network(read_file(network));
  abn::DissectionPlan plan = abn::build_plan(net);

  std::int64_t final_max = 0;
  for (const abn::DissectionNode* leaf : plan.leaves) {
    final_max = std::max(final_max, leaf->max_table);
  }
  ordered_json steps = ordered_json::array();
  collect_steps(plan.root.get(), net, steps);

  if (json) {
    ordered_json doc;
    doc["command"] = "plan";
    doc["root_max_table_size"] = plan.root->max_table;
    doc["steps"] = std::move(steps);
    ordered_json leaves = ordered_json::array();
    for (const abn::DissectionNode* leaf : plan.leaves) {
      ordered_json entry;
      entry["weight"] = sig9(leaf->weight);
      entry["max_table_size"] = leaf->max_table;
      ordered_json cliques = ordered_json::array();
      for (const auto& clique : leaf->tree->cliques) {
        cliques.push_back(clique_names(net, clique));
      }
      entry["cliques"] = std::move(cliques);
      leaves.push_back(std::move(entry));
    }
    doc["leaves"] = std::move(leaves);
    doc["final_max_table_size"] = final_max;
    emit(doc);
  } else {
    std::cout << "largest clique table: " << plan.root->max_table << "\n";
    for (const auto& step : steps) {
      std::cout << "dissect " << step["node"].get<std::string>() << ": "
                << step["before"] << " -> " << step["after"] << "\n";
    }
    std::cout << "leaves: " << plan.leaves.size() << "\n";
    for (std::size_t i = 0; i < plan.leaves.size(); ++i) {
      const abn::DissectionNode* leaf = plan.leaves[i];
      std::cout << "  leaf " << i << ": weight " << fmt9(leaf->weight)
                << ", max table " << leaf->max_table << ", cliques";
      for (const auto& clique : leaf->tree->cliques) {
        std::cout << " {";
        for (std::size_t v = 0; v < clique.size(); ++v) {
          if (v) std::cout << ",";
          std::cout << net.var(clique[v]).name;
        }
        std::cout << "}";
      }
      std::cout << "\n";
    }
    std::cout << "largest clique table after dissection: " << final_max << "\n";
  }
  return 0;
}

// ------------------------------------------------------------- validate ----

int run_validate(const std::string& network, bool json) {
  std::vector<std::pair<std::string, bool>> checks;
  abn::Network net = abn::parse_network(read_file(network));
  checks.push_back({"model-invariants", true});

  bool rows_ok = true;
  for (int i = 0; i < net.node_count(); ++i) {
    abn::FullCpt eff = abn::effective_cpt(net, i);
    for (const auto& row : eff.rows) {
      double sum = 0.0;
      for (double v : row) sum += v;
      if (std::abs(sum - 1.0) > 1e-9) rows_ok = false;
    }
  }
  checks.push_back({"effective-rows-normalized", rows_ok});

  abn::JunctionTree jt = abn::build_junction_tree(net);
  checks.push_back({"families-covered", true});

  bool rip = true;
  for (int v = 0; v < net.node_count(); ++v) {
    std::vector<int> holders;
    for (std::size_t c = 0; c < jt.cliques.size(); ++c) {
      if (jt.contains(static_cast<int>(c), v)) holders.push_back(static_cast<int>(c));
    }
    if (holders.empty()) {
      rip = false;
      continue;
    }
    // The cliques holding v must form a connected subtree.
    std::vector<int> stack{holders.front()};
    std::vector<bool> seen(jt.cliques.size(), false);
    seen[static_cast<std::size_t>(holders.front())] = true;
    std::size_t reached = 1;
    while (!stack.empty()) {
      int c = stack.back();
      stack.pop_back();
      for (std::size_t e = 0; e < jt.edges.size(); ++e) {
        int other = -1;
        if (jt.edges[e][0] == c) other = jt.edges[e][1];
        if (jt.edges[e][1] == c) other = jt.edges[e][0];
        if (other < 0 || seen[static_cast<std::size_t>(other)]) continue;
        if (!jt.contains(other, v)) continue;
        seen[static_cast<std::size_t>(other)] = true;
        stack.push_back(other);
        ++reached;
      }
    }
    if (reached != holders.size()) rip = false;
  }
  checks.push_back({"running-intersection", rip});

  abn::CalibratedTree calibrated = abn::ls_calibrate(jt, abn::Evidence{});
  bool seps_ok = true;
  for (std::size_t e = 0; e < jt.edges.size(); ++e) {
    abn::Table a = calibrated.tree.potentials[static_cast<std::size_t>(jt.edges[e][0])]
                       .marginal(jt.separators[e]);
    abn::Table b = calibrated.tree.potentials[static_cast<std::size_t>(jt.edges[e][1])]
                       .marginal(jt.separators[e]);
    for (std::size_t i = 0; i < a.values.size(); ++i) {
      if (std::abs(a.values[i] - b.values[i]) > 1e-9) seps_ok = false;
    }
  }
  checks.push_back({"separator-consistency", seps_ok});

  bool joint_ok = true;
  std::int64_t total = 1;
  for (int i = 0; i < net.node_count(); ++i) total *= net.cardinality(i);
  if (total <= enum_cap()) {
    abn::JointTable joint = abn::enumerate_joint(net, enum_cap());
    double sum = 0.0;
    for (double v : joint.values) sum += v;
    joint_ok = std::abs(sum - 1.0) <= 1e-9;
    checks.push_back({"joint-normalized", joint_ok});
  }

  bool all_ok = true;
  for (const auto& [name, ok] : checks) all_ok = all_ok && ok;
  if (json) {
    ordered_json doc;
    doc["command"] = "validate";
    ordered_json list = ordered_json::array();
    for (const auto& [name, ok] : checks) list.push_back({{"name", name}, {"ok", ok}});
    doc["checks"] = std::move(list);
    doc["ok"] = all_ok;
    emit(doc);
  } else {
    for (const auto& [name, ok] : checks) {
      std::cout << (ok ? "ok   " : "FAIL ") << name << "\n";
    }
  }
  return all_ok ? 0 : 1;
}

// -------------------------------------------------------------- partition --

int run_partition(const std::string& icgraph) {
  abn::UndirectedGraph graph = abn::parse_icg(read_file(icgraph));
  abn::Partition partition = abn::prescribe_partition(graph);

  ordered_json doc;
  doc["command"] = "partition";
  doc["vertices"] = graph.vertices;
  doc["clique"] = partition.clique;
  ordered_json subsets = ordered_json::array();
  ordered_json terms = ordered_json::array();
  double weight = sig9(1.0 / static_cast<double>(partition.subsets.size()));
  for (const auto& [member, subset] : partition.subsets) {
    subsets.push_back({{"member", member}, {"subset", subset}});
    terms.push_back({{"weight", weight}, {"given", subset}, {"rows", ordered_json::array()}});
  }
  doc["subsets"] = std::move(subsets);
  doc["skeleton"] = {{"type", "additive"}, {"terms", std::move(terms)}};
  emit(doc);
  return 0;
}

// -------------------------------------------------------------------- fit --

int run_fit(const std::string& network, const std::string& decomp, bool json,
            const std::string& out_path) {
  abn::Network net = abn::parse_network(read_file(network));
  abn::Network reference = abn::expand_to_full(net);

  ordered_json spec;
  try {
    spec = ordered_json::parse(read_file(decomp));
  } catch (const nlohmann::json::parse_error& e) {
    abn::fail(abn::Errc::syntax, std::string("decomposition spec: ") + e.what());
  }
  if (!spec.is_object()) {
    abn::fail(abn::Errc::syntax, "decomposition spec must map node names to subset lists");
  }

  abn::Network fitted = reference;
  ordered_json nodes = ordered_json::array();
  double total = 0.0;
  bool any_diverged = false;
  for (const auto& [node_name, subset_list] : spec.items()) {
    int node = net.require_variable(node_name);
    if (!subset_list.is_array() || subset_list.empty()) {
      abn::fail(abn::Errc::syntax, "node '" + node_name + "': expected a list of subsets");
    }

    abn::AdditiveCpt terms;
    terms.child = node;
    terms.parents = reference.parents_of(node);
    std::vector<std::vector<std::int64_t>> uniform_rows;
    for (const auto& subset_names : subset_list) {
      std::vector<int> subset;
      for (const auto& name : subset_names) {
        subset.push_back(net.require_variable(name.get<std::string>()));
      }
      abn::MarginalizedCpt term = abn::marginalize_cpt(reference, node, subset);
      abn::AdditiveTerm t;
      t.weight = 1.0 / static_cast<double>(subset_list.size());
      t.given = term.given;
      t.rows = term.rows;
      terms.terms.push_back(std::move(t));
      uniform_rows.push_back(term.uniform_rows);
    }
    {
      // The term subsets must still cover the parent set.
      std::set<int> covered;
      for (const auto& t : terms.terms) covered.insert(t.given.begin(), t.given.end());
      if (covered.size() != terms.parents.size()) {
        abn::fail(abn::Errc::subset_union,
                  "node '" + node_name + "': subsets do not cover the parent set");
      }
    }

    abn::FamilyMarginal family = abn::family_marginal(reference, node);
    abn::FullCpt ref_cpt = abn::effective_cpt(reference, node);
    abn::NodeFitProblem problem = abn::make_fit_problem(reference, family, ref_cpt, terms);
    abn::FitResult result = abn::optimize_weights(problem);
    total += result.cross_entropy;
    any_diverged = any_diverged || result.diverged;

    for (std::size_t t = 0; t < terms.terms.size(); ++t) {
      terms.terms[t].weight = result.weights[t];
    }
    fitted.nodes[static_cast<std::size_t>(node)] = terms;

    ordered_json entry;
    entry["node"] = node_name;
    entry["subsets"] = subset_list;
    entry["weights"] = num_list(result.weights);
    entry["cross_entropy"] = sig9(result.cross_entropy);
    entry["residual_norm"] = sig9(result.residual_norm);
    entry["interior"] = result.interior;
    entry["non_identifiable"] = result.non_identifiable;
    entry["diverged"] = result.diverged;
    ordered_json fallback = ordered_json::array();
    for (std::size_t t = 0; t < uniform_rows.size(); ++t) {
      if (!uniform_rows[t].empty()) fallback.push_back({{"term", t}, {"rows", uniform_rows[t]}});
    }
    if (!fallback.empty()) entry["uniform_fallback"] = std::move(fallback);
    nodes.push_back(std::move(entry));
  }

  if (!out_path.empty()) {
    std::ofstream out(out_path);
    if (!out.good()) abn::fail(abn::Errc::bad_argument, "cannot write '" + out_path + "'");
    out << abn::serialize_network(fitted);
  }

  if (json) {
    ordered_json doc;
    doc["command"] = "fit";
    doc["nodes"] = std::move(nodes);
    doc["total_cross_entropy"] = sig9(total);
    doc["diverged"] = any_diverged;
    emit(doc);
  } else {
    for (const auto& entry : nodes) {
      std::cout << entry["node"].get<std::string>() << ": weights";
      for (const auto& w : entry["weights"]) std::cout << " " << fmt9(w.get<double>());
      std::cout << ", I = " << fmt9(entry["cross_entropy"].get<double>())
                << ", residual " << fmt9(entry["residual_norm"].get<double>()) << "\n";
    }
    std::cout << "total cross entropy: " << fmt9(total) << "\n";
  }
  return 0;
}

// ---------------------------------------------------------------- crossent -

int run_crossent(const std::string& network, const std::string& abnm_path, bool json) {
  abn::Network reference = abn::parse_network(read_file(network));
  abn::Network approx = abn::parse_network(read_file(abnm_path));
  abn::CrossEntropy total = abn::cross_entropy_total(reference, approx, enum_cap());

  abn::Network expanded = abn::expand_to_full(reference);
  ordered_json per_node = ordered_json::array();
  double node_sum = 0.0;
  for (int id = 0; id < approx.node_count(); ++id) {
    if (!approx.is_additive(id)) continue;
    const auto& terms = std::get<abn::AdditiveCpt>(approx.nodes[static_cast<std::size_t>(id)]);
    abn::FamilyMarginal family = abn::family_marginal(expanded, id);
    abn::FullCpt ref_cpt = abn::effective_cpt(expanded, id);
    abn::WeightVector weights;
    for (const auto& t : terms.terms) weights.push_back(t.weight);
    abn::CrossEntropy value =
        abn::node_cross_entropy(abn::make_fit_problem(expanded, family, ref_cpt, terms), weights);
    node_sum += value.value;
    per_node.push_back({{"node", approx.var(id).name}, {"value", sig9(value.value)}});
  }

  if (json) {
    ordered_json doc;
    doc["command"] = "crossent";
    doc["total"] = total.diverged ? ordered_json("inf") : ordered_json(sig9(total.value));
    doc["diverged"] = total.diverged;
    doc["per_node"] = std::move(per_node);
    doc["per_node_total"] = sig9(node_sum);
    emit(doc);
  } else {
    if (total.diverged) {
      std::cout << "total cross entropy: inf (approximation has a hard zero)\n";
    } else {
      std::cout << "total cross entropy: " << fmt9(total.value) << "\n";
    }
    for (const auto& entry : per_node) {
      std::cout << "  " << entry["node"].get<std::string>() << ": "
                << fmt9(entry["value"].get<double>()) << "\n";
    }
  }
  return 0;
}

// ---------------------------------------------------------- update-weights -

int run_update(const std::string& network, const std::string& cases_path,
               const std::string& node_name, double grid, bool json) {
  abn::Network net = abn::parse_network(read_file(network));
  int node = net.require_variable(node_name);
  if (!net.is_additive(node)) {
    abn::fail(abn::Errc::bad_argument, "node '" + node_name + "' is not additive");
  }
  const auto& add = std::get<abn::AdditiveCpt>(net.nodes[static_cast<std::size_t>(node)]);
  int k = static_cast<int>(add.terms.size());

  abn::CaseSet cases = abn::parse_cases(read_file(cases_path), net);
  std::vector<abn::Evidence> observations;
  observations.reserve(cases.rows.size());
  for (const auto& row : cases.rows) {
    abn::Evidence ev;
    for (std::size_t c = 0; c < cases.columns.size(); ++c) {
      if (row[c] != abn::CaseSet::kMissing) ev.assignments[cases.columns[c]] = row[c];
    }
    observations.push_back(std::move(ev));
  }

  abn::WeightPosterior prior = abn::uniform_posterior(k, grid);
  abn::WeightPosterior posterior = abn::bayes_update_weights(prior, net, node, observations);
  abn::PosteriorSummary summary = abn::summarize_posterior(posterior);

  if (json) {
    ordered_json doc;
    doc["command"] = "update-weights";
    doc["node"] = node_name;
    doc["grid_step"] = sig9(grid);
    doc["cases"] = observations.size();
    doc["posterior_mean"] = num_list(summary.mean);
    doc["posterior_mode"] = num_list(summary.mode);
    doc["interval_low"] = sig9(summary.interval_low);
    doc["interval_high"] = sig9(summary.interval_high);
    emit(doc);
  } else {
    std::cout << node_name << " posterior over " << observations.size() << " cases:\n";
    std::cout << "  mean:";
    for (double m : summary.mean) std::cout << " " << fmt9(m);
    std::cout << "\n  mode:";
    for (double m : summary.mode) std::cout << " " << fmt9(m);
    std::cout << "\n  95% interval of first weight: [" << fmt9(summary.interval_low)
              << ", " << fmt9(summary.interval_high) << "]\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"additive belief-network toolkit"};
  app.require_subcommand(1);

  InferOptions infer_opt;
  CLI::App* infer = app.add_subcommand("infer", "query a marginal under evidence");
  infer->add_option("--network", infer_opt.network, "network file")->required();
  infer->add_option("--query", infer_opt.query, "query variable")->required();
  infer->add_option("--evidence", infer_opt.evidence, "VAR=STATE[,VAR=STATE...]");
  infer->add_option("--method", infer_opt.method, "abnm | ls | enum");
  infer->add_option("--combination", infer_opt.combination, "exact | naive");
  infer->add_flag("--json", infer_opt.json, "machine-readable output");

  std::string plan_network;
  bool plan_json = false;
  CLI::App* plan = app.add_subcommand("plan", "report the dissection plan");
  plan->add_option("--network", plan_network, "network file")->required();
  plan->add_flag("--json", plan_json, "machine-readable output");

  std::string validate_network;
  bool validate_json = false;
  CLI::App* validate = app.add_subcommand("validate", "run invariant checks");
  validate->add_option("--network", validate_network, "network file")->required();
  validate->add_flag("--json", validate_json, "machine-readable output");

  std::string partition_icg;
  CLI::App* partition = app.add_subcommand("partition", "prescribe parent subsets");
  partition->add_option("--icgraph", partition_icg, "intercausal graph file")->required();

  std::string fit_network, fit_decomp, fit_out;
  bool fit_json = false;
  CLI::App* fit = app.add_subcommand("fit", "fit weights against a full model");
  fit->add_option("--network", fit_network, "full network file")->required();
  fit->add_option("--decomp", fit_decomp, "decomposition spec (JSON)")->required();
  fit->add_option("--out", fit_out, "write the fitted network here");
  fit->add_flag("--json", fit_json, "machine-readable output");

  std::string ce_network, ce_abnm;
  bool ce_json = false;
  CLI::App* crossent = app.add_subcommand("crossent", "cross entropy between two models");
  crossent->add_option("--network", ce_network, "reference network file")->required();
  crossent->add_option("--abnm", ce_abnm, "approximating network file")->required();
  crossent->add_flag("--json", ce_json, "machine-readable output");

  std::string up_network, up_cases, up_node;
  double up_grid = 0.01;
  bool up_json = false;
  CLI::App* update = app.add_subcommand("update-weights", "Bayesian weight posterior from cases");
  update->add_option("--network", up_network, "network file")->required();
  update->add_option("--cases", up_cases, "case file (CSV)")->required();
  update->add_option("--node", up_node, "additive node to update")->required();
  update->add_option("--grid", up_grid, "posterior grid step");
  update->add_flag("--json", up_json, "machine-readable output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (*infer) return run_infer(infer_opt);
    if (*plan) return run_plan(plan_network, plan_json);
    if (*validate) return run_validate(validate_network, validate_json);
    if (*partition) return run_partition(partition_icg);
    if (*fit) return run_fit(fit_network, fit_decomp, fit_json, fit_out);
    if (*crossent) return run_crossent(ce_network, ce_abnm, ce_json);
    if (*update) return run_update(up_network, up_cases, up_node, up_grid, up_json);
  } catch (const abn::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.code() == abn::Errc::internal ? 2 : 1;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}

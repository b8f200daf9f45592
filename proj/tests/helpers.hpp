#pragma once

#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "abn/format.hpp"
#include "abn/model.hpp"

namespace testutil {

inline std::string read_file(const std::string& path) {
  std::ifstream in(path);
  REQUIRE_MESSAGE(in.good(), "cannot open " << path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline std::string data_path(const std::string& name) {
  return std::string(ABN_DATA_DIR) + "/" + name;
}

inline abn::Network load_network(const std::string& name) {
  return abn::parse_network(read_file(data_path(name)));
}

struct Rng {
  std::mt19937 gen;
  explicit Rng(unsigned seed) : gen(seed) {}

  double uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(gen); }
  int pick(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(gen); }

  std::vector<double> distribution(int d) {
    std::vector<double> row(static_cast<std::size_t>(d));
    double sum = 0.0;
    for (double& v : row) {
      v = -std::log(std::max(uniform(), 1e-12)) + 0.02;
      sum += v;
    }
    for (double& v : row) v /= sum;
    return row;
  }
};

inline std::vector<std::vector<double>> random_rows(Rng& rng, std::int64_t configs, int d) {
  std::vector<std::vector<double>> rows;
  rows.reserve(static_cast<std::size_t>(configs));
  for (std::int64_t r = 0; r < configs; ++r) rows.push_back(rng.distribution(d));
  return rows;
}

// Random DAG over `n` nodes in declaration order, cardinalities 2..4, with
// nodes of two or more parents sometimes carrying a random additive CPT whose
// subsets cover (and may overlap) the parent set.
inline abn::Network random_network(Rng& rng, int n, double edge_prob = 0.45,
                                   double additive_prob = 0.6) {
  abn::Network net;
  for (int i = 0; i < n; ++i) {
    abn::Variable v;
    v.name = "v" + std::to_string(i);
    int d = rng.pick(2, 4);
    for (int s = 0; s < d; ++s) v.states.push_back("s" + std::to_string(s));
    net.variables.push_back(std::move(v));
  }
  for (int i = 0; i < n; ++i) {
    std::vector<int> parents;
    for (int p = 0; p < i; ++p) {
      if (rng.uniform() < edge_prob && parents.size() < 3) parents.push_back(p);
    }
    std::vector<int> pcards;
    for (int p : parents) pcards.push_back(net.cardinality(p));
    std::int64_t configs = abn::config_count(pcards);
    int d = net.cardinality(i);

    if (parents.size() >= 2 && rng.uniform() < additive_prob) {
      abn::AdditiveCpt add;
      add.child = i;
      add.parents = parents;
      int k = rng.uniform() < 0.8 ? 2 : 3;
      // Random cover: every parent lands somewhere, extras may overlap.
      std::vector<std::vector<int>> subsets(static_cast<std::size_t>(k));
      for (std::size_t pi = 0; pi < parents.size(); ++pi) {
        subsets[static_cast<std::size_t>(rng.pick(0, k - 1))].push_back(parents[pi]);
        for (auto& sub : subsets) {
          if (!sub.empty() && sub.back() != parents[pi] && rng.uniform() < 0.25) {
            sub.push_back(parents[pi]);
          }
        }
      }
      // Empty subsets steal one parent so every term conditions on something.
      for (auto& sub : subsets) {
        if (sub.empty()) sub.push_back(parents[static_cast<std::size_t>(rng.pick(0, static_cast<int>(parents.size()) - 1))]);
        std::sort(sub.begin(), sub.end());
        sub.erase(std::unique(sub.begin(), sub.end()), sub.end());
      }
      std::vector<double> weights = rng.distribution(k);
      for (int t = 0; t < k; ++t) {
        abn::AdditiveTerm term;
        term.weight = weights[static_cast<std::size_t>(t)];
        term.given = subsets[static_cast<std::size_t>(t)];
        std::vector<int> scards;
        for (int g : term.given) scards.push_back(net.cardinality(g));
        term.rows = random_rows(rng, abn::config_count(scards), d);
        add.terms.push_back(std::move(term));
      }
      net.nodes.push_back(std::move(add));
    } else {
      abn::FullCpt full;
      full.child = i;
      full.parents = parents;
      full.rows = random_rows(rng, configs, d);
      net.nodes.push_back(std::move(full));
    }
  }
  abn::validate_network(net);
  return net;
}

inline abn::Evidence random_evidence(Rng& rng, const abn::Network& net, double p_include) {
  abn::Evidence ev;
  for (int i = 0; i < net.node_count(); ++i) {
    if (rng.uniform() < p_include) {
      ev.assignments[i] = rng.pick(0, net.cardinality(i) - 1);
    }
  }
  return ev;
}

// Forward sampling from the effective-CPT joint, in topological order.
inline abn::CaseSet forward_sample(Rng& rng, const abn::Network& net, int cases) {
  std::vector<int> order = net.topological_order();
  std::vector<abn::FullCpt> cpts;
  for (int i = 0; i < net.node_count(); ++i) cpts.push_back(abn::effective_cpt(net, i));

  abn::CaseSet out;
  for (int i = 0; i < net.node_count(); ++i) out.columns.push_back(i);
  for (int c = 0; c < cases; ++c) {
    std::vector<int> state(static_cast<std::size_t>(net.node_count()), -1);
    for (int id : order) {
      const abn::FullCpt& cpt = cpts[static_cast<std::size_t>(id)];
      std::vector<int> pstates;
      std::vector<int> pcards;
      for (int p : cpt.parents) {
        pstates.push_back(state[static_cast<std::size_t>(p)]);
        pcards.push_back(net.cardinality(p));
      }
      const auto& row = cpt.rows[static_cast<std::size_t>(abn::config_row(pstates, pcards))];
      double u = rng.uniform();
      double acc = 0.0;
      int chosen = net.cardinality(id) - 1;
      for (int s = 0; s < net.cardinality(id); ++s) {
        acc += row[static_cast<std::size_t>(s)];
        if (u <= acc) {
          chosen = s;
          break;
        }
      }
      state[static_cast<std::size_t>(id)] = chosen;
    }
    out.rows.push_back(std::move(state));
  }
  return out;
}

}  // namespace testutil

#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "abn/errors.hpp"
#include "abn/fit.hpp"
#include "abn/infer.hpp"
#include "helpers.hpp"

using namespace abn;

namespace {

// Pr[node, parents] straight from the enumerated joint, in CPT row layout.
std::vector<std::vector<double>> family_by_enumeration(const Network& net, int node) {
  JointTable joint = enumerate_joint(net);
  std::vector<int> cards;
  for (int i = 0; i < net.node_count(); ++i) cards.push_back(net.cardinality(i));
  const std::vector<int>& parents = net.parents_of(node);
  std::vector<int> pcards;
  for (int p : parents) pcards.push_back(net.cardinality(p));
  int d = net.cardinality(node);

  std::vector<std::vector<double>> rows(
      static_cast<std::size_t>(config_count(pcards)),
      std::vector<double>(static_cast<std::size_t>(d), 0.0));
  std::vector<int> state(cards.size(), 0);
  for (std::size_t idx = 0; idx < joint.values.size(); ++idx) {
    std::vector<int> pstates;
    for (int p : parents) pstates.push_back(state[static_cast<std::size_t>(p)]);
    rows[static_cast<std::size_t>(config_row(pstates, pcards))]
        [static_cast<std::size_t>(state[static_cast<std::size_t>(node)])] += joint.values[idx];
    for (std::size_t dd = state.size(); dd-- > 0;) {
      if (++state[dd] < cards[dd]) break;
      state[dd] = 0;
    }
  }
  return rows;
}

NodeFitProblem riot_alarm_problem(const Network& net, AdditiveCpt* terms_out = nullptr) {
  int alarm = net.require_variable("Alarm");
  const auto& add = std::get<AdditiveCpt>(net.nodes[static_cast<std::size_t>(alarm)]);
  FamilyMarginal family = family_marginal(net, alarm);
  FullCpt reference = effective_cpt(net, alarm);
  if (terms_out != nullptr) *terms_out = add;
  return make_fit_problem(net, family, reference, add);
}

// Standalone fitting problem: random parent joint, random term tables, and a
// reference that is either the exact mixture at `true_weights` or random.
NodeFitProblem synthetic_problem(testutil::Rng& rng, int k, int configs, int d,
                                 const WeightVector* true_weights) {
  NodeFitProblem prob;
  prob.states = d;
  std::vector<double> joint = rng.distribution(configs);
  for (int t = 0; t < k; ++t) {
    std::vector<double> expanded;
    for (int r = 0; r < configs; ++r) {
      std::vector<double> row = rng.distribution(d);
      expanded.insert(expanded.end(), row.begin(), row.end());
    }
    prob.terms.push_back(std::move(expanded));
  }
  for (int r = 0; r < configs; ++r) {
    std::vector<double> row;
    if (true_weights != nullptr) {
      row.assign(static_cast<std::size_t>(d), 0.0);
      for (int t = 0; t < k; ++t) {
        for (int x = 0; x < d; ++x) {
          row[static_cast<std::size_t>(x)] +=
              (*true_weights)[static_cast<std::size_t>(t)] *
              prob.terms[static_cast<std::size_t>(t)][static_cast<std::size_t>(r * d + x)];
        }
      }
    } else {
      row = rng.distribution(d);
    }
    for (int x = 0; x < d; ++x) {
      prob.reference.push_back(row[static_cast<std::size_t>(x)]);
      prob.family.push_back(joint[static_cast<std::size_t>(r)] * row[static_cast<std::size_t>(x)]);
    }
  }
  return prob;
}

double grid_minimum(const NodeFitProblem& prob, double step) {
  std::size_t k = prob.terms.size();
  double best = std::numeric_limits<double>::infinity();
  if (k == 2) {
    for (double a = 0.0; a <= 1.0 + 1e-12; a += step) {
      best = std::min(best, node_cross_entropy(prob, {a, 1.0 - a}).value);
    }
  } else {
    for (double a = 0.0; a <= 1.0 + 1e-12; a += step) {
      for (double b = 0.0; a + b <= 1.0 + 1e-12; b += step) {
        best = std::min(best, node_cross_entropy(prob, {a, b, 1.0 - a - b}).value);
      }
    }
  }
  return best;
}

}  // namespace

TEST_CASE("family marginal of a root node is its prior") {
  Network net = testutil::load_network("riot.abn");
  FamilyMarginal fm = family_marginal(net, net.require_variable("Verdict"));
  REQUIRE(fm.rows.size() == 1);
  CHECK(fm.rows[0][0] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(fm.rows[0][1] == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("family marginal matches enumeration and marginalizes consistently") {
  Network net = testutil::load_network("riot.abn");
  int alarm = net.require_variable("Alarm");
  FamilyMarginal fm = family_marginal(net, alarm);
  std::vector<std::vector<double>> expected = family_by_enumeration(net, alarm);
  REQUIRE(fm.rows.size() == 4);
  for (std::size_t r = 0; r < 4; ++r) {
    for (std::size_t x = 0; x < 2; ++x) {
      CHECK(std::abs(fm.rows[r][x] - expected[r][x]) <= 1e-9);
    }
  }
  // Summing out the child gives the parent-set marginal.
  JointTable joint = enumerate_joint(net);
  double riot_true = 0.0;
  for (std::size_t r = 2; r < 4; ++r) riot_true += fm.rows[r][0] + fm.rows[r][1];
  Evidence none;
  QueryResult pr = query_by_enumeration(net, net.require_variable("Riot"), none);
  CHECK(riot_true == doctest::Approx(pr.distribution[1]).epsilon(1e-9));
  (void)joint;
}

TEST_CASE("cross entropy is zero exactly on identical models and positive otherwise") {
  Network net = testutil::load_network("riot.abn");
  Network reference = expand_to_full(net);

  SUBCASE("identical") {
    CrossEntropy ce = cross_entropy_total(reference, net);
    CHECK(!ce.diverged);
    CHECK(ce.value == 0.0);
  }
  SUBCASE("perturbed weights, total equals the per-node sum") {
    Network perturbed = net;
    int alarm = net.require_variable("Alarm");
    auto& add = std::get<AdditiveCpt>(perturbed.nodes[static_cast<std::size_t>(alarm)]);
    add.terms[0].weight = 0.25;
    add.terms[1].weight = 0.75;
    CrossEntropy total = cross_entropy_total(reference, perturbed);
    CHECK(total.value > 0.0);

    FamilyMarginal family = family_marginal(reference, alarm);
    FullCpt ref_cpt = effective_cpt(reference, alarm);
    NodeFitProblem prob = make_fit_problem(reference, family, ref_cpt, add);
    CrossEntropy node = node_cross_entropy(prob, {0.25, 0.75});
    CHECK(std::abs(total.value - node.value) <= 1e-9);
  }
  SUBCASE("hard zero in the approximation diverges") {
    Network degenerate = net;
    int alarm = net.require_variable("Alarm");
    auto& add = std::get<AdditiveCpt>(degenerate.nodes[static_cast<std::size_t>(alarm)]);
    add.terms[0].rows = {{1.0, 0.0}, {1.0, 0.0}};
    add.terms[1].rows = {{1.0, 0.0}, {1.0, 0.0}};
    CrossEntropy ce = cross_entropy_total(reference, degenerate);
    CHECK(ce.diverged);
    CHECK(std::isinf(ce.value));
  }
  SUBCASE("structure mismatch is rejected") {
    Network other = parse_network(R"({
      "variables": [{"name": "A", "states": ["f", "t"]}],
      "nodes": [{"var": "A", "parents": [], "cpt": {"type": "full", "rows": [[0.5, 0.5]]}}]
    })");
    CHECK_THROWS_AS(cross_entropy_total(reference, other), Error);
  }
}

TEST_CASE("per-node cross entropies sum to the total on random networks") {
  testutil::Rng rng(8001);
  for (int trial = 0; trial < 15; ++trial) {
    Network abnm = testutil::random_network(rng, rng.pick(3, 8));
    Network reference = expand_to_full(abnm);
    // Perturb every additive node's weights so the models differ.
    bool any = false;
    for (int id = 0; id < abnm.node_count(); ++id) {
      if (!abnm.is_additive(id)) continue;
      any = true;
      auto& add = std::get<AdditiveCpt>(abnm.nodes[static_cast<std::size_t>(id)]);
      std::vector<double> w = rng.distribution(static_cast<int>(add.terms.size()));
      for (std::size_t t = 0; t < add.terms.size(); ++t) add.terms[t].weight = w[t];
    }
    if (!any) continue;

    CrossEntropy total = cross_entropy_total(reference, abnm);
    double node_sum = 0.0;
    for (int id = 0; id < abnm.node_count(); ++id) {
      if (!abnm.is_additive(id)) continue;
      const auto& add = std::get<AdditiveCpt>(abnm.nodes[static_cast<std::size_t>(id)]);
      WeightVector w;
      for (const auto& t : add.terms) w.push_back(t.weight);
      FamilyMarginal family = family_marginal(reference, id);
      FullCpt ref_cpt = effective_cpt(reference, id);
      node_sum += node_cross_entropy(make_fit_problem(reference, family, ref_cpt, add), w).value;
    }
    CHECK(total.value >= 0.0);
    CHECK(std::abs(total.value - node_sum) <= 1e-9);
  }
}

TEST_CASE("node cross entropy is convex in the weights") {
  testutil::Rng rng(8002);
  for (int trial = 0; trial < 25; ++trial) {
    int k = trial % 2 == 0 ? 2 : 3;
    NodeFitProblem prob = synthetic_problem(rng, k, 4, 3, nullptr);
    WeightVector a = rng.distribution(k);
    WeightVector b = rng.distribution(k);
    double ia = node_cross_entropy(prob, a).value;
    double ib = node_cross_entropy(prob, b).value;
    for (double lambda : {0.25, 0.5, 0.75}) {
      WeightVector mix(a.size());
      for (std::size_t j = 0; j < a.size(); ++j) mix[j] = lambda * a[j] + (1.0 - lambda) * b[j];
      double im = node_cross_entropy(prob, mix).value;
      CHECK(im <= lambda * ia + (1.0 - lambda) * ib + 1e-9);
    }
  }
}

TEST_CASE("stationarity residual") {
  testutil::Rng rng(8003);
  SUBCASE("identical term tables give a zero residual everywhere") {
    NodeFitProblem prob = synthetic_problem(rng, 2, 4, 2, nullptr);
    prob.terms[1] = prob.terms[0];
    for (double a : {0.2, 0.5, 0.9}) {
      std::vector<double> r = stationarity_residual(prob, {a, 1.0 - a});
      CHECK(r[0] == 0.0);
    }
  }
  SUBCASE("boundary weights are rejected") {
    NodeFitProblem prob = synthetic_problem(rng, 2, 4, 2, nullptr);
    try {
      stationarity_residual(prob, {1.0, 0.0});
      FAIL_CHECK("expected boundary error");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::boundary_weights);
    }
  }
  SUBCASE("residual is the negative central finite difference of the objective") {
    const double h = 1e-6;
    for (int trial = 0; trial < 30; ++trial) {
      int k = trial % 2 == 0 ? 2 : 3;
      NodeFitProblem prob = synthetic_problem(rng, k, rng.pick(2, 6), rng.pick(2, 3), nullptr);
      WeightVector w = rng.distribution(k);
      for (double& x : w) x = 0.1 + 0.8 * x;  // keep well inside the simplex
      double sum = 0.0;
      for (double x : w) sum += x;
      for (double& x : w) x /= sum;

      std::vector<double> residual = stationarity_residual(prob, w);
      for (std::size_t j = 0; j + 1 < static_cast<std::size_t>(k); ++j) {
        WeightVector hi = w, lo = w;
        hi[j] += h;
        hi[static_cast<std::size_t>(k - 1)] -= h;
        lo[j] -= h;
        lo[static_cast<std::size_t>(k - 1)] += h;
        double fd = (node_cross_entropy(prob, hi).value -
                     node_cross_entropy(prob, lo).value) / (2.0 * h);
        CHECK(std::abs(residual[j] + fd) <= 1e-5);
      }
    }
  }
}

TEST_CASE("optimize_weights recovers exact mixtures") {
  SUBCASE("constructed k=2 mixture at 0.3") {
    testutil::Rng rng(8004);
    WeightVector truth{0.3, 0.7};
    NodeFitProblem prob = synthetic_problem(rng, 2, 4, 2, &truth);
    FitResult fit = optimize_weights(prob);
    CHECK(std::abs(fit.weights[0] - 0.3) <= 1e-6);
    CHECK(fit.cross_entropy <= 1e-12);
    CHECK(fit.interior);
    CHECK(fit.residual_norm <= 1e-6);
  }
  SUBCASE("riot alarm refit recovers the file weights") {
    Network net = testutil::load_network("riot.abn");
    AdditiveCpt add;
    NodeFitProblem prob = riot_alarm_problem(net, &add);
    FitResult fit = optimize_weights(prob);
    CHECK(std::abs(fit.weights[0] - 0.6) <= 1e-6);
    CHECK(std::abs(fit.weights[1] - 0.4) <= 1e-6);
    CHECK(fit.cross_entropy <= 1e-12);
    // No grid point does better.
    CHECK(fit.cross_entropy <= grid_minimum(prob, 1e-3) + 1e-9);
  }
  SUBCASE("random non-mixture problems beat the grid") {
    testutil::Rng rng(8005);
    for (int trial = 0; trial < 10; ++trial) {
      NodeFitProblem prob = synthetic_problem(rng, 2, rng.pick(2, 8), rng.pick(2, 3), nullptr);
      FitResult fit = optimize_weights(prob);
      CHECK(fit.cross_entropy <= grid_minimum(prob, 1e-3) + 1e-9);
      if (fit.interior) CHECK(fit.residual_norm <= 1e-6);
    }
  }
  SUBCASE("identical terms are flagged non-identifiable") {
    testutil::Rng rng(8006);
    NodeFitProblem prob = synthetic_problem(rng, 2, 4, 2, nullptr);
    prob.terms[1] = prob.terms[0];
    FitResult fit = optimize_weights(prob);
    CHECK(fit.non_identifiable);
    CHECK(fit.weights[0] == doctest::Approx(0.5));
  }
}

TEST_CASE("weight posterior updates by Bayes rule") {
  Network net = testutil::load_network("riot.abn");
  int alarm = net.require_variable("Alarm");

  SUBCASE("no cases leave the prior untouched") {
    WeightPosterior prior = uniform_posterior(2, 0.1);
    WeightPosterior posterior = bayes_update_weights(prior, net, alarm, std::vector<Evidence>{});
    REQUIRE(posterior.mass.size() == prior.mass.size());
    for (std::size_t g = 0; g < prior.mass.size(); ++g) {
      CHECK(posterior.mass[g] == doctest::Approx(prior.mass[g]).epsilon(1e-12));
    }
  }
  SUBCASE("two grid points split mass by likelihood ratio") {
    WeightPosterior prior;
    prior.step = 1.0;
    prior.grid = {{0.2, 0.8}, {0.9, 0.1}};
    prior.mass = {0.5, 0.5};
    Evidence ev;
    ev.assignments[net.require_variable("Riot")] = 1;
    ev.assignments[alarm] = 1;

    auto likelihood_at = [&](double w0) {
      Network copy = net;
      auto& add = std::get<AdditiveCpt>(copy.nodes[static_cast<std::size_t>(alarm)]);
      add.terms[0].weight = w0;
      add.terms[1].weight = 1.0 - w0;
      return ls_calibrate(copy, ev).evidence_likelihood;
    };
    double l1 = likelihood_at(0.2), l2 = likelihood_at(0.9);
    WeightPosterior posterior = bayes_update_weights(prior, net, alarm, ev);
    CHECK(posterior.mass[0] == doctest::Approx(l1 / (l1 + l2)).epsilon(1e-9));
    CHECK(posterior.mass[1] == doctest::Approx(l2 / (l1 + l2)).epsilon(1e-9));
  }
  SUBCASE("case-by-case equals the batch update") {
    testutil::Rng rng(8007);
    CaseSet cases = testutil::forward_sample(rng, net, 50);
    std::vector<Evidence> observations;
    for (const auto& row : cases.rows) {
      Evidence ev;
      for (std::size_t c = 0; c < cases.columns.size(); ++c) {
        ev.assignments[cases.columns[c]] = row[c];
      }
      observations.push_back(ev);
    }
    WeightPosterior prior = uniform_posterior(2, 0.05);
    WeightPosterior batch = bayes_update_weights(prior, net, alarm, observations);
    WeightPosterior sequential = prior;
    for (const Evidence& ev : observations) {
      sequential = bayes_update_weights(sequential, net, alarm, ev);
    }
    for (std::size_t g = 0; g < batch.mass.size(); ++g) {
      CHECK(std::abs(batch.mass[g] - sequential.mass[g]) <= 1e-9);
    }
    // Shuffled case order leaves the posterior unchanged.
    std::vector<Evidence> shuffled(observations.rbegin(), observations.rend());
    WeightPosterior reversed = bayes_update_weights(prior, net, alarm, shuffled);
    for (std::size_t g = 0; g < batch.mass.size(); ++g) {
      CHECK(std::abs(batch.mass[g] - reversed.mass[g]) <= 1e-9);
    }
  }
  SUBCASE("partial cases update too") {
    WeightPosterior prior = uniform_posterior(2, 0.1);
    Evidence partial;
    partial.assignments[alarm] = 1;
    WeightPosterior posterior = bayes_update_weights(prior, net, alarm, partial);
    double sum = 0.0;
    for (double m : posterior.mass) sum += m;
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("marginalize_cpt") {
  SUBCASE("a CPT constant in the removed parents keeps its slices") {
    Network net = parse_network(R"({
      "variables": [{"name": "A", "states": ["f", "t"]},
                    {"name": "B", "states": ["f", "t"]},
                    {"name": "Y", "states": ["f", "t"]}],
      "nodes": [
        {"var": "A", "parents": [], "cpt": {"type": "full", "rows": [[0.3, 0.7]]}},
        {"var": "B", "parents": [], "cpt": {"type": "full", "rows": [[0.6, 0.4]]}},
        {"var": "Y", "parents": ["A", "B"], "cpt": {"type": "full", "rows":
          [[0.9, 0.1], [0.9, 0.1], [0.2, 0.8], [0.2, 0.8]]}}
      ]
    })");
    int y = net.require_variable("Y");
    MarginalizedCpt got = marginalize_cpt(net, y, {net.require_variable("A")});
    CHECK(got.rows[0][0] == doctest::Approx(0.9).epsilon(1e-12));
    CHECK(got.rows[1][1] == doctest::Approx(0.8).epsilon(1e-12));
    CHECK(got.uniform_rows.empty());
  }
  SUBCASE("the full parent set is the identity") {
    Network net = testutil::load_network("riot.abn");
    Network full = expand_to_full(net);
    int alarm = full.require_variable("Alarm");
    MarginalizedCpt got = marginalize_cpt(full, alarm, full.parents_of(alarm));
    FullCpt original = effective_cpt(full, alarm);
    for (std::size_t r = 0; r < original.rows.size(); ++r) {
      for (std::size_t x = 0; x < original.rows[r].size(); ++x) {
        CHECK(std::abs(got.rows[r][x] - original.rows[r][x]) <= 1e-12);
      }
    }
  }
  SUBCASE("riot alarm onto Riot matches the enumeration conditional") {
    Network net = expand_to_full(testutil::load_network("riot.abn"));
    int alarm = net.require_variable("Alarm");
    int riot = net.require_variable("Riot");
    MarginalizedCpt got = marginalize_cpt(net, alarm, {riot});

    for (int rs = 0; rs < 2; ++rs) {
      Evidence ev;
      ev.assignments[riot] = rs;
      QueryResult oracle = query_by_enumeration(net, alarm, ev);
      for (int x = 0; x < 2; ++x) {
        CHECK(std::abs(got.rows[static_cast<std::size_t>(rs)][static_cast<std::size_t>(x)] -
                       oracle.distribution[static_cast<std::size_t>(x)]) <= 1e-9);
      }
    }
  }
  SUBCASE("zero-probability subset rows fall back to uniform weighting") {
    Network net = parse_network(R"({
      "variables": [{"name": "A", "states": ["f", "t"]},
                    {"name": "B", "states": ["f", "t"]},
                    {"name": "Y", "states": ["f", "t"]}],
      "nodes": [
        {"var": "A", "parents": [], "cpt": {"type": "full", "rows": [[1.0, 0.0]]}},
        {"var": "B", "parents": [], "cpt": {"type": "full", "rows": [[0.5, 0.5]]}},
        {"var": "Y", "parents": ["A", "B"], "cpt": {"type": "full", "rows":
          [[0.9, 0.1], [0.8, 0.2], [0.3, 0.7], [0.1, 0.9]]}}
      ]
    })");
    MarginalizedCpt got = marginalize_cpt(net, net.require_variable("Y"),
                                          {net.require_variable("A")});
    REQUIRE(got.uniform_rows.size() == 1);
    CHECK(got.uniform_rows[0] == 1);  // A = t never happens
    CHECK(got.rows[1][1] == doctest::Approx(0.5 * 0.7 + 0.5 * 0.9).epsilon(1e-12));
  }
}

TEST_CASE("induce_cpt counts with Laplace smoothing") {
  Network net = testutil::load_network("riot.abn");
  int alarm = net.require_variable("Alarm");
  int riot = net.require_variable("Riot");

  SUBCASE("empty case set gives uniform rows") {
    CaseSet cases;
    cases.columns = {riot, alarm};
    InducedCpt got = induce_cpt(cases, net, alarm, {riot});
    for (const auto& row : got.rows) {
      CHECK(row[0] == doctest::Approx(0.5));
      CHECK(row[1] == doctest::Approx(0.5));
    }
    CHECK(got.unobserved_rows.size() == 2);
  }
  SUBCASE("hand-counted four cases") {
    CaseSet cases = parse_cases("Riot,Alarm\nt,t\nt,t\nt,t\nt,f\n", net);
    InducedCpt got = induce_cpt(cases, net, alarm, {riot});
    CHECK(got.rows[1][1] == doctest::Approx(4.0 / 6.0).epsilon(1e-12));
    CHECK(got.rows[1][0] == doctest::Approx(2.0 / 6.0).epsilon(1e-12));
    CHECK(got.rows[0][0] == doctest::Approx(0.5));  // unobserved row stays uniform
  }
  SUBCASE("pseudocount zero allows degenerate rows") {
    CaseSet cases = parse_cases("Riot,Alarm\nt,t\nt,t\n", net);
    InducedCpt got = induce_cpt(cases, net, alarm, {riot}, 0.0);
    CHECK(got.rows[1][1] == doctest::Approx(1.0));
    CHECK(got.rows[1][0] == doctest::Approx(0.0));
    CHECK(got.rows[0][0] == doctest::Approx(0.5));  // zero observations, uniform
  }
  SUBCASE("cases missing family cells are skipped and reported") {
    CaseSet cases = parse_cases("Riot,Alarm\nt,?\nt,t\n?,f\n", net);
    InducedCpt got = induce_cpt(cases, net, alarm, {riot});
    CHECK(got.skipped_cases == 2);
  }
}

#include "abn/fit.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <set>
#include <sstream>

#include "abn/dissect.hpp"
#include "abn/errors.hpp"

namespace abn {

namespace {

constexpr double kLogFloor = 1e-300;

std::vector<int> cards_of(const Network& net, const std::vector<int>& vars) {
  std::vector<int> cards;
  cards.reserve(vars.size());
  for (int v : vars) cards.push_back(net.cardinality(v));
  return cards;
}

}  // namespace

FamilyMarginal family_marginal(const Network& net, int node) {
  if (node < 0 || node >= net.node_count()) {
    fail(Errc::unknown_variable, "family node out of range");
  }
  JunctionTree jt = build_junction_tree(net);
  CalibratedTree calibrated = ls_calibrate(jt, Evidence{});

  std::vector<int> family = net.family_of(node);
  int home = -1;
  for (std::size_t c = 0; c < jt.cliques.size(); ++c) {
    if (std::includes(jt.cliques[c].begin(), jt.cliques[c].end(), family.begin(),
                      family.end())) {
      home = static_cast<int>(c);
      break;
    }
  }
  if (home < 0) fail(Errc::internal, "family fits in no clique");
  Table joint = calibrated.tree.potentials[static_cast<std::size_t>(home)].marginal(family);

  FamilyMarginal out;
  out.node = node;
  out.parents = net.parents_of(node);
  std::vector<int> pcards = cards_of(net, out.parents);
  int d = net.cardinality(node);
  std::int64_t configs = config_count(pcards);
  out.rows.assign(static_cast<std::size_t>(configs),
                  std::vector<double>(static_cast<std::size_t>(d), 0.0));

  std::vector<std::int64_t> strides = joint.strides();
  std::vector<int> ppos;
  ppos.reserve(out.parents.size());
  for (int p : out.parents) ppos.push_back(joint.position_of(p));
  int npos = joint.position_of(node);
  for (std::int64_t r = 0; r < configs; ++r) {
    std::vector<int> states = row_config(r, pcards);
    std::int64_t base = 0;
    for (std::size_t i = 0; i < ppos.size(); ++i) {
      base += states[i] * strides[static_cast<std::size_t>(ppos[i])];
    }
    for (int x = 0; x < d; ++x) {
      out.rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(x)] =
          joint.values[static_cast<std::size_t>(base + x * strides[static_cast<std::size_t>(npos)])];
    }
  }
  return out;
}

CrossEntropy cross_entropy_total(const Network& reference, const Network& abnm,
                                 std::int64_t cap) {
  if (reference.variables.size() != abnm.variables.size()) {
    fail(Errc::bad_argument, "networks declare different variables");
  }
  for (std::size_t i = 0; i < reference.variables.size(); ++i) {
    if (reference.variables[i].name != abnm.variables[i].name ||
        reference.variables[i].states != abnm.variables[i].states) {
      fail(Errc::bad_argument, "networks declare different variables");
    }
    std::vector<int> a = reference.parents_of(static_cast<int>(i));
    std::vector<int> b = abnm.parents_of(static_cast<int>(i));
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    if (a != b) {
      fail(Errc::bad_argument,
           "parent sets differ at node '" + reference.variables[i].name + "'");
    }
  }

  JointTable p = enumerate_joint(reference, cap);
  JointTable q = enumerate_joint(abnm, cap);
  CrossEntropy out;
  for (std::size_t i = 0; i < p.values.size(); ++i) {
    if (p.values[i] <= 0.0) continue;
    if (q.values[i] <= 0.0) {
      out.diverged = true;
      out.value = std::numeric_limits<double>::infinity();
      return out;
    }
    out.value += p.values[i] * std::log(p.values[i] / q.values[i]);
  }
  return out;
}

NodeFitProblem make_fit_problem(const Network& net, const FamilyMarginal& family,
                                const FullCpt& reference, const AdditiveCpt& terms) {
  if (family.node != reference.child || family.node != terms.child ||
      family.parents != reference.parents || family.parents != terms.parents) {
    fail(Errc::bad_argument, "family, reference and terms disagree on the node");
  }
  std::vector<int> pcards = cards_of(net, family.parents);
  int d = net.cardinality(family.node);
  std::int64_t configs = config_count(pcards);
  if (static_cast<std::int64_t>(family.rows.size()) != configs ||
      static_cast<std::int64_t>(reference.rows.size()) != configs) {
    fail(Errc::bad_argument, "row counts disagree with the parent cardinalities");
  }

  NodeFitProblem prob;
  prob.states = d;
  prob.family.reserve(static_cast<std::size_t>(configs * d));
  prob.reference.reserve(static_cast<std::size_t>(configs * d));
  for (std::int64_t r = 0; r < configs; ++r) {
    for (int x = 0; x < d; ++x) {
      prob.family.push_back(family.rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(x)]);
      prob.reference.push_back(reference.rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(x)]);
    }
  }
  for (const AdditiveTerm& term : terms.terms) {
    std::vector<int> positions;
    std::vector<int> sub_cards;
    for (int g : term.given) {
      auto it = std::find(family.parents.begin(), family.parents.end(), g);
      if (it == family.parents.end()) {
        fail(Errc::bad_argument, "term conditions on a non-parent");
      }
      positions.push_back(static_cast<int>(it - family.parents.begin()));
      sub_cards.push_back(net.cardinality(g));
    }
    std::vector<double> expanded;
    expanded.reserve(static_cast<std::size_t>(configs * d));
    for (std::int64_t r = 0; r < configs; ++r) {
      std::vector<int> states = row_config(r, pcards);
      std::int64_t sub = 0;
      for (std::size_t i = 0; i < positions.size(); ++i) {
        sub = sub * sub_cards[i] + states[static_cast<std::size_t>(positions[i])];
      }
      const auto& row = term.rows[static_cast<std::size_t>(sub)];
      for (int x = 0; x < d; ++x) expanded.push_back(row[static_cast<std::size_t>(x)]);
    }
    prob.terms.push_back(std::move(expanded));
  }
  return prob;
}

namespace {

double mixture_at(const NodeFitProblem& prob, const WeightVector& w, std::size_t e) {
  double m = 0.0;
  for (std::size_t j = 0; j < prob.terms.size(); ++j) m += w[j] * prob.terms[j][e];
  return m;
}

}  // namespace

CrossEntropy node_cross_entropy(const NodeFitProblem& prob, const WeightVector& weights) {
  if (weights.size() != prob.terms.size()) {
    fail(Errc::bad_argument, "weight count does not match the term count");
  }
  CrossEntropy out;
  for (std::size_t e = 0; e < prob.family.size(); ++e) {
    double f = prob.family[e];
    if (f <= 0.0) continue;
    double ref = prob.reference[e];
    double mix = mixture_at(prob, weights, e);
    if (ref < kLogFloor || mix < kLogFloor) out.diverged = true;
    out.value += f * (std::log(std::max(ref, kLogFloor)) - std::log(std::max(mix, kLogFloor)));
  }
  return out;
}

std::vector<double> stationarity_residual(const NodeFitProblem& prob,
                                          const WeightVector& weights) {
  std::size_t k = prob.terms.size();
  if (weights.size() != k) {
    fail(Errc::bad_argument, "weight count does not match the term count");
  }
  for (double w : weights) {
    if (w <= 0.0 || w >= 1.0) {
      fail(Errc::boundary_weights, "residual requires strictly interior weights");
    }
  }
  std::vector<double> residual(k - 1, 0.0);
  for (std::size_t e = 0; e < prob.family.size(); ++e) {
    double f = prob.family[e];
    if (f <= 0.0) continue;
    double mix = std::max(mixture_at(prob, weights, e), kLogFloor);
    double last = prob.terms[k - 1][e];
    for (std::size_t j = 0; j + 1 < k; ++j) {
      residual[j] += f * (prob.terms[j][e] - last) / mix;
    }
  }
  return residual;
}

namespace {

double objective(const NodeFitProblem& prob, const WeightVector& w) {
  double value = 0.0;
  for (std::size_t e = 0; e < prob.family.size(); ++e) {
    double f = prob.family[e];
    if (f <= 0.0) continue;
    value -= f * std::log(std::max(mixture_at(prob, w, e), kLogFloor));
  }
  return value;  // node cross entropy minus the weight-free reference part
}

// dI/da for k = 2 with weights (a, 1 - a); nondecreasing by convexity.
double slope2(const NodeFitProblem& prob, double a) {
  double g = 0.0;
  for (std::size_t e = 0; e < prob.family.size(); ++e) {
    double f = prob.family[e];
    if (f <= 0.0) continue;
    double mix = std::max(a * prob.terms[0][e] + (1.0 - a) * prob.terms[1][e], kLogFloor);
    g -= f * (prob.terms[0][e] - prob.terms[1][e]) / mix;
  }
  return g;
}

WeightVector project_simplex(WeightVector v) {
  WeightVector u = v;
  std::sort(u.begin(), u.end(), std::greater<>());
  double cumulative = 0.0;
  double tau = 0.0;
  int rho = 0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    cumulative += u[i];
    double candidate = (cumulative - 1.0) / static_cast<double>(i + 1);
    if (u[i] - candidate > 0.0) {
      rho = static_cast<int>(i + 1);
      tau = candidate;
    }
  }
  (void)rho;
  for (double& x : v) x = std::max(x - tau, 0.0);
  return v;
}

std::vector<double> full_gradient(const NodeFitProblem& prob, const WeightVector& w) {
  std::vector<double> g(w.size(), 0.0);
  for (std::size_t e = 0; e < prob.family.size(); ++e) {
    double f = prob.family[e];
    if (f <= 0.0) continue;
    double mix = std::max(mixture_at(prob, w, e), kLogFloor);
    for (std::size_t j = 0; j < w.size(); ++j) {
      g[j] -= f * prob.terms[j][e] / mix;
    }
  }
  return g;
}

// Newton steps on the reduced coordinates (the last weight is dependent),
// used to sharpen interior solutions. Returns false when a step fails.
bool newton_polish(const NodeFitProblem& prob, WeightVector& w) {
  std::size_t k = prob.terms.size();
  std::size_t r = k - 1;
  for (int iter = 0; iter < 60; ++iter) {
    std::vector<double> grad(r, 0.0);
    std::vector<double> hess(r * r, 0.0);
    for (std::size_t e = 0; e < prob.family.size(); ++e) {
      double f = prob.family[e];
      if (f <= 0.0) continue;
      double mix = std::max(mixture_at(prob, w, e), kLogFloor);
      double last = prob.terms[k - 1][e];
      for (std::size_t a = 0; a < r; ++a) {
        double da = prob.terms[a][e] - last;
        grad[a] -= f * da / mix;
        for (std::size_t b = 0; b < r; ++b) {
          double db = prob.terms[b][e] - last;
          hess[a * r + b] += f * da * db / (mix * mix);
        }
      }
    }
    double gnorm = 0.0;
    for (double g : grad) gnorm = std::max(gnorm, std::abs(g));
    if (gnorm <= 1e-11) return true;

    // Solve hess * delta = -grad with a small ridge for safety.
    std::vector<double> a = hess;
    for (std::size_t i = 0; i < r; ++i) a[i * r + i] += 1e-13;
    std::vector<double> delta(r);
    for (std::size_t i = 0; i < r; ++i) delta[i] = -grad[i];
    for (std::size_t col = 0; col < r; ++col) {
      std::size_t pivot = col;
      for (std::size_t row = col + 1; row < r; ++row) {
        if (std::abs(a[row * r + col]) > std::abs(a[pivot * r + col])) pivot = row;
      }
      if (std::abs(a[pivot * r + col]) < 1e-300) return false;
      if (pivot != col) {
        for (std::size_t c = 0; c < r; ++c) std::swap(a[col * r + c], a[pivot * r + c]);
        std::swap(delta[col], delta[pivot]);
      }
      for (std::size_t row = col + 1; row < r; ++row) {
        double factor = a[row * r + col] / a[col * r + col];
        for (std::size_t c = col; c < r; ++c) a[row * r + c] -= factor * a[col * r + c];
        delta[row] -= factor * delta[col];
      }
    }
    for (std::size_t i = r; i-- > 0;) {
      for (std::size_t j = i + 1; j < r; ++j) delta[i] -= a[i * r + j] * delta[j];
      delta[i] /= a[i * r + i];
    }

    double base = objective(prob, w);
    double t = 1.0;
    bool moved = false;
    for (int half = 0; half < 50; ++half) {
      WeightVector trial = w;
      double sum = 0.0;
      bool feasible = true;
      for (std::size_t i = 0; i < r; ++i) {
        trial[i] += t * delta[i];
        if (trial[i] < 0.0 || trial[i] > 1.0) feasible = false;
        sum += trial[i];
      }
      trial[k - 1] = 1.0 - sum;
      if (trial[k - 1] < 0.0 || trial[k - 1] > 1.0) feasible = false;
      if (feasible && objective(prob, trial) <= base) {
        w = trial;
        moved = true;
        break;
      }
      t *= 0.5;
    }
    if (!moved) return gnorm <= 1e-8;
  }
  return true;
}

}  // namespace

FitResult optimize_weights(const NodeFitProblem& prob) {
  std::size_t k = prob.terms.size();
  if (k == 0) fail(Errc::bad_argument, "no terms to fit");

  FitResult result;
  if (k == 1) {
    result.weights = {1.0};
    CrossEntropy ce = node_cross_entropy(prob, result.weights);
    result.cross_entropy = ce.value;
    result.diverged = ce.diverged;
    return result;
  }

  bool identical = true;
  for (std::size_t j = 1; j < k && identical; ++j) {
    for (std::size_t e = 0; e < prob.terms[j].size(); ++e) {
      if (std::abs(prob.terms[j][e] - prob.terms[0][e]) > 1e-12) {
        identical = false;
        break;
      }
    }
  }
  if (identical) {
    result.weights.assign(k, 1.0 / static_cast<double>(k));
    result.non_identifiable = true;
    result.interior = true;
    CrossEntropy ce = node_cross_entropy(prob, result.weights);
    result.cross_entropy = ce.value;
    result.diverged = ce.diverged;
    return result;
  }

  if (k == 2) {
    // Golden section to locate the minimum, then a bisection on the slope to
    // sharpen it; the objective is convex so the slope has a single root.
    const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double lo = 0.0, hi = 1.0;
    double x1 = hi - phi * (hi - lo), x2 = lo + phi * (hi - lo);
    double f1 = objective(prob, {x1, 1.0 - x1});
    double f2 = objective(prob, {x2, 1.0 - x2});
    while (hi - lo > 1e-8) {
      if (f1 <= f2) {
        hi = x2;
        x2 = x1;
        f2 = f1;
        x1 = hi - phi * (hi - lo);
        f1 = objective(prob, {x1, 1.0 - x1});
      } else {
        lo = x1;
        x1 = x2;
        f1 = f2;
        x2 = lo + phi * (hi - lo);
        f2 = objective(prob, {x2, 1.0 - x2});
      }
    }
    double a;
    if (slope2(prob, 0.0) >= 0.0) {
      a = 0.0;
    } else if (slope2(prob, 1.0) <= 0.0) {
      a = 1.0;
    } else {
      double blo = 0.0, bhi = 1.0;
      for (int iter = 0; iter < 200 && bhi - blo > 1e-16; ++iter) {
        double mid = 0.5 * (blo + bhi);
        if (slope2(prob, mid) < 0.0) {
          blo = mid;
        } else {
          bhi = mid;
        }
      }
      a = 0.5 * (blo + bhi);
    }
    result.weights = {a, 1.0 - a};
  } else {
    WeightVector w(k, 1.0 / static_cast<double>(k));
    double step = 1.0;
    for (int iter = 0; iter < 5000; ++iter) {
      std::vector<double> grad = full_gradient(prob, w);
      WeightVector fixed_point = w;
      for (std::size_t j = 0; j < k; ++j) fixed_point[j] -= grad[j];
      fixed_point = project_simplex(fixed_point);
      double gap = 0.0;
      for (std::size_t j = 0; j < k; ++j) gap = std::max(gap, std::abs(fixed_point[j] - w[j]));
      if (gap <= 1e-10) break;

      double base = objective(prob, w);
      bool moved = false;
      for (int half = 0; half < 60; ++half) {
        WeightVector trial = w;
        for (std::size_t j = 0; j < k; ++j) trial[j] -= step * grad[j];
        trial = project_simplex(trial);
        if (objective(prob, trial) < base) {
          w = trial;
          moved = true;
          step *= 1.5;
          break;
        }
        step *= 0.5;
      }
      if (!moved) break;
    }
    bool interior = std::all_of(w.begin(), w.end(), [](double x) { return x > 1e-9; });
    if (interior) newton_polish(prob, w);
    result.weights = w;
  }

  // Clean boundary round-off and restore an exact unit sum.
  double sum = 0.0;
  for (double& wj : result.weights) {
    if (wj < 1e-15) wj = 0.0;
    if (wj > 1.0 - 1e-15) wj = 1.0;
    sum += wj;
  }
  if (sum > 0.0 && std::abs(sum - 1.0) > 1e-15) {
    for (double& wj : result.weights) wj /= sum;
  }

  result.interior = std::all_of(result.weights.begin(), result.weights.end(),
                                [](double x) { return x > 0.0 && x < 1.0; });
  if (result.interior) {
    std::vector<double> residual = stationarity_residual(prob, result.weights);
    for (double rj : residual) result.residual_norm = std::max(result.residual_norm, std::abs(rj));
  }
  CrossEntropy ce = node_cross_entropy(prob, result.weights);
  result.cross_entropy = ce.value;
  result.diverged = ce.diverged;
  return result;
}

WeightPosterior uniform_posterior(int k, double step) {
  if (k < 1 || step <= 0.0 || step > 1.0) {
    fail(Errc::bad_argument, "posterior grid needs k >= 1 and step in (0, 1]");
  }
  int ticks = static_cast<int>(std::llround(1.0 / step));
  if (ticks < 1) ticks = 1;
  WeightPosterior posterior;
  posterior.step = step;

  // All length-k compositions of `ticks`, first component ascending.
  std::vector<int> counts(static_cast<std::size_t>(k), 0);
  std::function<void(int, int)> emit = [&](int pos, int remaining) {
    if (pos == k - 1) {
      counts[static_cast<std::size_t>(pos)] = remaining;
      WeightVector w(static_cast<std::size_t>(k));
      double partial = 0.0;
      for (int i = 0; i < k - 1; ++i) {
        w[static_cast<std::size_t>(i)] = counts[static_cast<std::size_t>(i)] * step;
        partial += w[static_cast<std::size_t>(i)];
      }
      w[static_cast<std::size_t>(k - 1)] = 1.0 - partial;
      posterior.grid.push_back(std::move(w));
      return;
    }
    for (int c = 0; c <= remaining; ++c) {
      counts[static_cast<std::size_t>(pos)] = c;
      emit(pos + 1, remaining - c);
    }
  };
  emit(0, ticks);
  posterior.mass.assign(posterior.grid.size(), 1.0 / static_cast<double>(posterior.grid.size()));
  return posterior;
}

namespace {

// Full dissection mixed by weights: the leaves carry no additive nodes, so a
// case's per-leaf likelihood is computed once and reused for every grid
// point. The leaf weight factors into the target node's term weight times a
// fixed product over the other dissected nodes.
struct WeightLikelihood {
  DissectionPlan plan;
  std::vector<int> term_of_leaf;
  std::vector<double> fixed_factor;
  int term_count = 0;

  WeightLikelihood(const Network& net, int node) {
    const NodeCpt& cpt = net.nodes.at(static_cast<std::size_t>(node));
    const auto* add = std::get_if<AdditiveCpt>(&cpt);
    if (add == nullptr) {
      fail(Errc::bad_argument, "node '" + net.var(node).name + "' is not additive");
    }
    term_count = static_cast<int>(add->terms.size());
    plan = build_full_dissection(net);
    walk(plan.root.get(), node, 0, 1.0);
    if (term_of_leaf.size() != plan.leaves.size()) {
      fail(Errc::internal, "dissection walk out of step with the leaf list");
    }
  }

  void walk(const DissectionNode* n, int node, int term, double fixed) {
    if (n->is_leaf()) {
      term_of_leaf.push_back(term);
      fixed_factor.push_back(fixed);
      return;
    }
    const auto& add = std::get<AdditiveCpt>(n->net.nodes[static_cast<std::size_t>(n->dissected)]);
    for (std::size_t t = 0; t < n->children.size(); ++t) {
      if (n->dissected == node) {
        walk(n->children[t].get(), node, static_cast<int>(t), fixed);
      } else {
        walk(n->children[t].get(), node, term, fixed * add.terms[t].weight);
      }
    }
  }

  std::vector<double> leaf_likelihoods(const Evidence& observation) const {
    std::vector<double> out;
    out.reserve(plan.leaves.size());
    for (const DissectionNode* leaf : plan.leaves) {
      out.push_back(ls_calibrate_unchecked(*leaf->tree, observation).evidence_likelihood);
    }
    return out;
  }

  double likelihood(const std::vector<double>& leaf_l, const WeightVector& w) const {
    double total = 0.0;
    for (std::size_t i = 0; i < leaf_l.size(); ++i) {
      total += fixed_factor[i] * w[static_cast<std::size_t>(term_of_leaf[i])] * leaf_l[i];
    }
    return total;
  }
};

}  // namespace

WeightPosterior bayes_update_weights(const WeightPosterior& prior, const Network& abnm,
                                     int node, const std::vector<Evidence>& observations) {
  WeightLikelihood model(abnm, node);
  for (const WeightVector& w : prior.grid) {
    if (static_cast<int>(w.size()) != model.term_count) {
      fail(Errc::bad_argument, "grid dimension does not match the node's term count");
    }
  }

  std::vector<double> log_mass(prior.grid.size());
  for (std::size_t g = 0; g < prior.grid.size(); ++g) {
    log_mass[g] = prior.mass[g] > 0.0 ? std::log(prior.mass[g])
                                      : -std::numeric_limits<double>::infinity();
  }
  for (const Evidence& observation : observations) {
    std::vector<double> leaf_l = model.leaf_likelihoods(observation);
    bool any = false;
    for (std::size_t g = 0; g < prior.grid.size(); ++g) {
      double l = model.likelihood(leaf_l, prior.grid[g]);
      if (l > 0.0 && std::isfinite(log_mass[g])) {
        log_mass[g] += std::log(l);
        any = true;
      } else {
        log_mass[g] = -std::numeric_limits<double>::infinity();
      }
    }
    if (!any) {
      fail(Errc::impossible_evidence, "a case has zero probability at every grid point");
    }
  }

  double peak = -std::numeric_limits<double>::infinity();
  for (double lm : log_mass) peak = std::max(peak, lm);
  if (!std::isfinite(peak)) {
    fail(Errc::impossible_evidence, "all grid points have zero posterior mass");
  }
  WeightPosterior posterior;
  posterior.grid = prior.grid;
  posterior.step = prior.step;
  posterior.mass.resize(prior.mass.size());
  double total = 0.0;
  for (std::size_t g = 0; g < log_mass.size(); ++g) {
    posterior.mass[g] = std::isfinite(log_mass[g]) ? std::exp(log_mass[g] - peak) : 0.0;
    total += posterior.mass[g];
  }
  for (double& m : posterior.mass) m /= total;
  return posterior;
}

WeightPosterior bayes_update_weights(const WeightPosterior& prior, const Network& abnm,
                                     int node, const Evidence& observation) {
  return bayes_update_weights(prior, abnm, node, std::vector<Evidence>{observation});
}

PosteriorSummary summarize_posterior(const WeightPosterior& posterior) {
  if (posterior.grid.empty()) fail(Errc::bad_argument, "empty posterior grid");
  std::size_t k = posterior.grid.front().size();
  PosteriorSummary summary;
  summary.mean.assign(k, 0.0);
  std::size_t mode = 0;
  for (std::size_t g = 0; g < posterior.grid.size(); ++g) {
    for (std::size_t j = 0; j < k; ++j) {
      summary.mean[j] += posterior.mass[g] * posterior.grid[g][j];
    }
    if (posterior.mass[g] > posterior.mass[mode]) mode = g;
  }
  summary.mode = posterior.grid[mode];

  // Central 95% interval of the first weight.
  std::vector<std::pair<double, double>> first;
  first.reserve(posterior.grid.size());
  for (std::size_t g = 0; g < posterior.grid.size(); ++g) {
    first.push_back({posterior.grid[g][0], posterior.mass[g]});
  }
  std::sort(first.begin(), first.end());
  double cumulative = 0.0;
  summary.interval_low = first.front().first;
  summary.interval_high = first.back().first;
  bool low_set = false;
  for (const auto& [value, mass] : first) {
    cumulative += mass;
    if (!low_set && cumulative >= 0.025) {
      summary.interval_low = value;
      low_set = true;
    }
    if (cumulative >= 0.975) {
      summary.interval_high = value;
      break;
    }
  }
  return summary;
}

MarginalizedCpt marginalize_cpt(const Network& net, int node, const std::vector<int>& subset) {
  const std::vector<int>& parents = net.parents_of(node);
  for (int s : subset) {
    if (std::find(parents.begin(), parents.end(), s) == parents.end()) {
      fail(Errc::bad_argument, "subset member is not a parent of the node");
    }
  }
  std::set<int> unique(subset.begin(), subset.end());
  if (unique.size() != subset.size()) {
    fail(Errc::bad_argument, "subset repeats a parent");
  }

  FullCpt cpt = effective_cpt(net, node);
  FamilyMarginal family = family_marginal(net, node);
  std::vector<int> pcards = cards_of(net, parents);
  int d = net.cardinality(node);
  std::int64_t configs = config_count(pcards);

  // Joint over the parents alone.
  std::vector<double> parent_joint(static_cast<std::size_t>(configs), 0.0);
  for (std::int64_t r = 0; r < configs; ++r) {
    for (int x = 0; x < d; ++x) {
      parent_joint[static_cast<std::size_t>(r)] +=
          family.rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(x)];
    }
  }

  std::vector<int> spos;
  std::vector<int> scards;
  for (int s : subset) {
    auto it = std::find(parents.begin(), parents.end(), s);
    spos.push_back(static_cast<int>(it - parents.begin()));
    scards.push_back(net.cardinality(s));
  }
  std::int64_t sub_configs = config_count(scards);

  MarginalizedCpt out;
  out.given = subset;
  out.rows.assign(static_cast<std::size_t>(sub_configs),
                  std::vector<double>(static_cast<std::size_t>(d), 0.0));
  std::vector<double> sub_mass(static_cast<std::size_t>(sub_configs), 0.0);
  std::vector<std::int64_t> members(static_cast<std::size_t>(sub_configs), 0);

  for (std::int64_t r = 0; r < configs; ++r) {
    std::vector<int> states = row_config(r, pcards);
    std::int64_t sub = 0;
    for (std::size_t i = 0; i < spos.size(); ++i) {
      sub = sub * scards[i] + states[static_cast<std::size_t>(spos[i])];
    }
    sub_mass[static_cast<std::size_t>(sub)] += parent_joint[static_cast<std::size_t>(r)];
    ++members[static_cast<std::size_t>(sub)];
  }

  for (std::int64_t r = 0; r < configs; ++r) {
    std::vector<int> states = row_config(r, pcards);
    std::int64_t sub = 0;
    for (std::size_t i = 0; i < spos.size(); ++i) {
      sub = sub * scards[i] + states[static_cast<std::size_t>(spos[i])];
    }
    double weight;
    if (sub_mass[static_cast<std::size_t>(sub)] > 0.0) {
      weight = parent_joint[static_cast<std::size_t>(r)] / sub_mass[static_cast<std::size_t>(sub)];
    } else {
      weight = 1.0 / static_cast<double>(members[static_cast<std::size_t>(sub)]);
    }
    for (int x = 0; x < d; ++x) {
      out.rows[static_cast<std::size_t>(sub)][static_cast<std::size_t>(x)] +=
          weight * cpt.rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(x)];
    }
  }
  for (std::int64_t s = 0; s < sub_configs; ++s) {
    if (sub_mass[static_cast<std::size_t>(s)] <= 0.0) out.uniform_rows.push_back(s);
  }
  return out;
}

InducedCpt induce_cpt(const CaseSet& cases, const Network& net, int node,
                      const std::vector<int>& subset, double pseudocount) {
  if (pseudocount < 0.0) fail(Errc::bad_argument, "pseudocount must be nonnegative");
  std::vector<int> family = subset;
  family.push_back(node);
  std::vector<int> column_of(family.size(), -1);
  for (std::size_t i = 0; i < family.size(); ++i) {
    for (std::size_t c = 0; c < cases.columns.size(); ++c) {
      if (cases.columns[c] == family[i]) {
        column_of[i] = static_cast<int>(c);
        break;
      }
    }
    if (column_of[i] < 0) {
      fail(Errc::bad_argument,
           "case columns do not cover '" + net.var(family[i]).name + "'");
    }
  }

  std::vector<int> scards = cards_of(net, subset);
  int d = net.cardinality(node);
  std::int64_t sub_configs = config_count(scards);

  std::vector<std::vector<double>> counts(
      static_cast<std::size_t>(sub_configs), std::vector<double>(static_cast<std::size_t>(d), 0.0));
  InducedCpt out;
  out.given = subset;
  for (const auto& row : cases.rows) {
    bool missing = false;
    for (int c : column_of) {
      if (row[static_cast<std::size_t>(c)] == CaseSet::kMissing) {
        missing = true;
        break;
      }
    }
    if (missing) {
      ++out.skipped_cases;
      continue;
    }
    std::int64_t sub = 0;
    for (std::size_t i = 0; i + 1 < family.size(); ++i) {
      sub = sub * scards[i] + row[static_cast<std::size_t>(column_of[i])];
    }
    int x = row[static_cast<std::size_t>(column_of.back())];
    counts[static_cast<std::size_t>(sub)][static_cast<std::size_t>(x)] += 1.0;
  }

  out.rows.assign(static_cast<std::size_t>(sub_configs),
                  std::vector<double>(static_cast<std::size_t>(d), 0.0));
  for (std::int64_t s = 0; s < sub_configs; ++s) {
    double total = 0.0;
    for (int x = 0; x < d; ++x) total += counts[static_cast<std::size_t>(s)][static_cast<std::size_t>(x)];
    if (total == 0.0) out.unobserved_rows.push_back(s);
    double denom = total + pseudocount * static_cast<double>(d);
    for (int x = 0; x < d; ++x) {
      if (denom > 0.0) {
        out.rows[static_cast<std::size_t>(s)][static_cast<std::size_t>(x)] =
            (counts[static_cast<std::size_t>(s)][static_cast<std::size_t>(x)] + pseudocount) / denom;
      } else {
        out.rows[static_cast<std::size_t>(s)][static_cast<std::size_t>(x)] =
            1.0 / static_cast<double>(d);
      }
    }
  }
  return out;
}

}  // namespace abn

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "abn/decompose.hpp"
#include "abn/errors.hpp"
#include "helpers.hpp"

using namespace abn;

namespace {

UndirectedGraph graph_of(const std::vector<std::string>& vertices,
                         const std::vector<std::pair<std::string, std::string>>& edges) {
  UndirectedGraph g;
  for (const auto& v : vertices) g.add_vertex(v);
  for (const auto& [a, b] : edges) g.add_edge(a, b);
  return g;
}

// Binary-child network with parents split across two additive terms; the
// pair (A, B) never shares a term.
Network random_split_network(testutil::Rng& rng, int extra_parents) {
  Network net;
  std::vector<std::string> names{"A", "B"};
  for (int i = 0; i < extra_parents; ++i) names.push_back("C" + std::to_string(i));
  for (const auto& name : names) {
    net.variables.push_back({name, {"f", "t"}});
  }
  net.variables.push_back({"Y", {"f", "t"}});
  int y = static_cast<int>(net.variables.size()) - 1;

  for (std::size_t i = 0; i < names.size(); ++i) {
    FullCpt root;
    root.child = static_cast<int>(i);
    root.rows = {rng.distribution(2)};
    net.nodes.push_back(std::move(root));
  }

  AdditiveCpt add;
  add.child = y;
  for (int p = 0; p < static_cast<int>(names.size()); ++p) add.parents.push_back(p);
  // Term 1 sees A plus a random share of the extras, term 2 sees B plus the rest.
  std::vector<int> s1{0}, s2{1};
  for (int i = 0; i < extra_parents; ++i) {
    (rng.uniform() < 0.5 ? s1 : s2).push_back(2 + i);
  }
  double w = 0.05 + 0.9 * rng.uniform();
  for (const auto& [subset, weight] : {std::pair(s1, w), std::pair(s2, 1.0 - w)}) {
    AdditiveTerm term;
    term.weight = weight;
    term.given = subset;
    std::sort(term.given.begin(), term.given.end());
    std::vector<int> cards(term.given.size(), 2);
    term.rows = testutil::random_rows(rng, config_count(cards), 2);
    add.terms.push_back(std::move(term));
  }
  net.nodes.push_back(std::move(add));
  validate_network(net);
  return net;
}

}  // namespace

TEST_CASE("partition prescription") {
  SUBCASE("complete graph yields all singletons") {
    UndirectedGraph g = graph_of({"A", "B", "C"}, {{"A", "B"}, {"B", "C"}, {"A", "C"}});
    Partition p = prescribe_partition(g);
    CHECK(p.clique == std::vector<std::string>{"A", "B", "C"});
    REQUIRE(p.subsets.size() == 3);
    for (const auto& [member, subset] : p.subsets) {
      CHECK(subset == std::vector<std::string>{member});
    }
  }
  SUBCASE("single edge splits the third predictor into both subsets") {
    UndirectedGraph g = graph_of({"A", "B", "C"}, {{"A", "B"}});
    Partition p = prescribe_partition(g);
    CHECK(p.clique == std::vector<std::string>{"A", "B"});
    REQUIRE(p.subsets.size() == 2);
    CHECK(p.subsets[0].first == "A");
    CHECK(p.subsets[0].second == std::vector<std::string>{"A", "C"});
    CHECK(p.subsets[1].first == "B");
    CHECK(p.subsets[1].second == std::vector<std::string>{"B", "C"});
  }
  SUBCASE("edgeless graph yields one full subset") {
    UndirectedGraph g = graph_of({"A", "B", "C"}, {});
    Partition p = prescribe_partition(g);
    REQUIRE(p.subsets.size() == 1);
    CHECK(p.subsets[0].second == std::vector<std::string>{"A", "B", "C"});
  }
  SUBCASE("empty graph is rejected") {
    CHECK_THROWS_AS(prescribe_partition(UndirectedGraph{}), Error);
  }
  SUBCASE("coverage on 500 random graphs") {
    testutil::Rng rng(9001);
    for (int trial = 0; trial < 500; ++trial) {
      int n = rng.pick(1, 12);
      UndirectedGraph g;
      for (int v = 0; v < n; ++v) g.add_vertex("p" + std::to_string(v));
      double density = rng.uniform();
      for (int a = 0; a < n; ++a) {
        for (int b = a + 1; b < n; ++b) {
          if (rng.uniform() < density) g.add_edge_by_index(a, b);
        }
      }
      Partition p = prescribe_partition(g);
      std::set<std::string> covered;
      for (const auto& [member, subset] : p.subsets) {
        CHECK(std::find(subset.begin(), subset.end(), member) != subset.end());
        covered.insert(subset.begin(), subset.end());
      }
      CHECK(covered.size() == static_cast<std::size_t>(n));
    }
  }
}

TEST_CASE("positive influence on the riot alarm") {
  Network net = testutil::load_network("riot.abn");
  FullCpt eff = effective_cpt(net, "Alarm");
  int riot = net.require_variable("Riot");
  int burglary = net.require_variable("Burglary");

  std::map<int, int> burglary_false{{burglary, 0}};
  CHECK(positive_influence(net, eff, riot, burglary_false));
  CHECK(positive_influence_all(net, eff, riot));
  CHECK(positive_influence_all(net, eff, burglary));

  // Flipping the designated positive state inverts the verdict.
  CHECK(!positive_influence(net, eff, riot, burglary_false, 0));

  // An anti-monotone table fails.
  Network anti = parse_network(R"({
    "variables": [{"name": "X", "states": ["f", "t"]},
                  {"name": "Y", "states": ["f", "t"]}],
    "nodes": [
      {"var": "X", "parents": [], "cpt": {"type": "full", "rows": [[0.5, 0.5]]}},
      {"var": "Y", "parents": ["X"], "cpt": {"type": "full", "rows": [[0.1, 0.9], [0.95, 0.05]]}}
    ]
  })");
  FullCpt anti_cpt = effective_cpt(anti, "Y");
  CHECK(!positive_influence(anti, anti_cpt, 0, {}));

  // Non-binary inputs are rejected.
  Network alarmx = testutil::load_network("alarmx.abn");
  FullCpt x4 = effective_cpt(alarmx, "x4");
  CHECK_THROWS_AS(positive_influence(alarmx, x4, alarmx.require_variable("x3"), {}), Error);
}

TEST_CASE("synergies of the riot alarm match hand arithmetic") {
  Network net = testutil::load_network("riot.abn");
  FullCpt eff = effective_cpt(net, "Alarm");
  int riot = net.require_variable("Riot");
  int burglary = net.require_variable("Burglary");

  double add = additive_synergy(net, eff, riot, burglary, {});
  CHECK(std::abs(add) <= 1e-12);  // 0.92 + 0.038 - 0.548 - 0.41

  double prod = product_synergy(net, eff, riot, burglary, {});
  CHECK(prod == doctest::Approx(-0.18972).epsilon(1e-9));
}

TEST_CASE("a boosted interaction shows up as additive synergy") {
  Network net = parse_network(R"({
    "variables": [{"name": "A", "states": ["f", "t"]},
                  {"name": "B", "states": ["f", "t"]},
                  {"name": "Y", "states": ["f", "t"]}],
    "nodes": [
      {"var": "A", "parents": [], "cpt": {"type": "full", "rows": [[0.5, 0.5]]}},
      {"var": "B", "parents": [], "cpt": {"type": "full", "rows": [[0.5, 0.5]]}},
      {"var": "Y", "parents": ["A", "B"], "cpt": {"type": "full", "rows":
        [[0.9, 0.1], [0.6, 0.4], [0.5, 0.5], [0.15, 0.85]]}}
    ]
  })");
  FullCpt cpt = effective_cpt(net, "Y");
  // P(t|tt) = 0.85 = mixture value 0.80 plus a 0.05 boost.
  double expected = 0.85 + 0.1 - 0.4 - 0.5;
  CHECK(additive_synergy(net, cpt, 0, 1, {}) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("degenerate weights kill product synergy") {
  testutil::Rng rng(9002);
  for (double w : {0.0, 1.0}) {
    Network net = random_split_network(rng, 0);
    auto& add = std::get<AdditiveCpt>(net.nodes.back());
    add.terms[0].weight = w;
    add.terms[1].weight = 1.0 - w;
    FullCpt eff = effective_cpt(net, "Y");
    double prod = product_synergy(net, eff, 0, 1, {});
    CHECK(std::abs(prod) <= 1e-12);
  }
}

TEST_CASE("split predictors: zero additive synergy, negative product synergy") {
  testutil::Rng rng(9003);
  int positive_pairs = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    Network net = random_split_network(rng, rng.pick(0, 2));
    FullCpt eff = effective_cpt(net, "Y");
    int a = 0, b = 1;
    std::vector<int> rest;
    for (int p : net.parents_of(net.require_variable("Y"))) {
      if (p != a && p != b) rest.push_back(p);
    }
    std::vector<int> cards(rest.size(), 2);
    std::int64_t contexts = config_count(cards);
    bool both_positive = positive_influence_all(net, eff, a) &&
                         positive_influence_all(net, eff, b);
    if (both_positive) ++positive_pairs;
    for (std::int64_t c = 0; c < contexts; ++c) {
      std::vector<int> states = row_config(c, cards);
      std::map<int, int> context;
      for (std::size_t i = 0; i < rest.size(); ++i) context[rest[i]] = states[i];
      CHECK(std::abs(additive_synergy(net, eff, a, b, context)) <= 1e-12);
      if (both_positive) {
        CHECK(product_synergy(net, eff, a, b, context) <= 1e-12);
      }
    }
  }
  CHECK(positive_pairs > 20);  // the conditional claim is actually exercised
}

#include <doctest.h>

#include <cmath>
#include <limits>
#include <set>

#include "apla/digraph.hpp"
#include "apla/errors.hpp"
#include "apla/stability.hpp"
#include "generators.hpp"
#include "linear_oracle.hpp"

using namespace apla;

namespace {

EdgeAnalysis edge(std::size_t from, std::size_t to, double prob, double gamma = 1.0) {
  EdgeAnalysis e;
  e.from = ProfileId{from};
  e.to = ProfileId{to};
  e.probability = prob;
  e.resistance = -std::log(prob);
  e.coefficient = e.resistance;
  e.gamma = gamma;
  return e;
}

ResistanceDigraph complete(std::size_t n, double prob, double gamma = 1.0) {
  std::vector<EdgeAnalysis> edges;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i != j) edges.push_back(edge(i, j, prob, gamma));
    }
  }
  return ResistanceDigraph(n, edges);
}

ResistanceDigraph stag_hunt_pla() {
  Params p;
  p.mode = Mode::PLA;
  return build_digraph(coordination_game(5, 1, 3, 4), p);
}

}  // namespace

TEST_CASE("digraph construction") {
  CHECK_THROWS_AS(ResistanceDigraph(2, {edge(0, 0, 0.5)}), UsageError);
  CHECK_THROWS_AS(ResistanceDigraph(2, {edge(0, 2, 0.5)}), UsageError);
  CHECK_THROWS_AS(ResistanceDigraph(2, {edge(0, 1, 0.5), edge(0, 1, 0.4)}), UsageError);
  const ResistanceDigraph d(3, {edge(2, 0, 0.5), edge(0, 1, 0.5)});
  CHECK(d.edges().front().from == ProfileId{0});
  REQUIRE(d.find(ProfileId{2}, ProfileId{0}) != nullptr);
  CHECK(d.find(ProfileId{1}, ProfileId{0}) == nullptr);
  CHECK(d.out_edges(1).empty());
}

TEST_CASE("W-graph enumeration counts") {
  const auto k4 = complete(4, 0.5);
  const std::vector<ProfileId> root{ProfileId{0}};
  CHECK(enumerate_wgraphs(k4, root).size() == 16);

  const auto square = stag_hunt_pla();
  const auto trees = enumerate_wgraphs(square, root);
  CHECK(trees.size() == 4);
  std::multiset<double> costs;
  for (const auto& t : trees) costs.insert(std::round(graph_cost(square, t, Weighting::Coefficient) * 1e9));
  CHECK(costs == std::multiset<double>{1.4e9, 1.4e9, 1.45e9, 1.45e9});

  const std::vector<ProfileId> all{ProfileId{0}, ProfileId{1}, ProfileId{2}, ProfileId{3}};
  const auto empty = enumerate_wgraphs(square, all);
  REQUIRE(empty.size() == 1);
  CHECK(empty.front().arrows.empty());

  const std::vector<ProfileId> none;
  CHECK_THROWS_AS(enumerate_wgraphs(square, none), UsageError);
  CHECK_THROWS_AS(enumerate_wgraphs(complete(13, 0.1), root), CapacityError);
  CHECK_NOTHROW(enumerate_wgraphs(complete(4, 0.1), root, 4));
  CHECK_THROWS_AS(enumerate_wgraphs(complete(5, 0.1), root, 4), CapacityError);
}

TEST_CASE("every enumerated graph satisfies both W-graph clauses") {
  testing::Engine rng(8);
  for (int trial = 0; trial < 30; ++trial) {
    const auto d = testing::random_one_step_digraph(rng, 8);
    std::vector<ProfileId> roots{ProfileId{testing::pick(rng, 0, d.node_count() - 1)}};
    if (trial % 3 == 0 && d.node_count() > 2) roots.push_back(ProfileId{(roots[0].value + 1) % d.node_count()});
    for (const auto& g : enumerate_wgraphs(d, roots)) REQUIRE(is_wgraph(g, d.node_count()));
  }
}

TEST_CASE("structural W-graph check rejects malformed graphs") {
  WGraph g;
  g.roots = {ProfileId{0}};
  g.arrows = {{ProfileId{1}, ProfileId{2}}, {ProfileId{2}, ProfileId{1}}};
  CHECK_FALSE(is_wgraph(g, 3));  // cycle
  g.arrows = {{ProfileId{1}, ProfileId{0}}};
  CHECK_FALSE(is_wgraph(g, 3));  // node 2 has no arrow
  g.arrows = {{ProfileId{1}, ProfileId{0}}, {ProfileId{2}, ProfileId{1}}, {ProfileId{0}, ProfileId{1}}};
  CHECK_FALSE(is_wgraph(g, 3));  // root with an arrow
  g.arrows = {{ProfileId{1}, ProfileId{0}}, {ProfileId{2}, ProfileId{1}}};
  CHECK(is_wgraph(g, 3));
  g.roots.clear();
  CHECK_FALSE(is_wgraph(g, 3));
}

TEST_CASE("minimum resistance on the Stag-Hunt square") {
  const auto d = stag_hunt_pla();
  const auto all = min_resistances(d);
  CHECK(all[0].value == doctest::Approx(1.4).epsilon(1e-12));
  CHECK(all[1].value == doctest::Approx(1.0 / 5 + 1.0 + 1.0 / 3).epsilon(1e-12));
  CHECK(all[2].value == doctest::Approx(1.0 / 5 + 1.0 + 1.0 / 3).epsilon(1e-12));
  CHECK(all[3].value == doctest::Approx(1.0 / 5 + 1.0 / 4 + 1.0 / 3).epsilon(1e-12));
  for (const auto& m : all) {
    CHECK(is_wgraph(m.witness, 4));
    CHECK(graph_cost(d, m.witness, Weighting::Coefficient) == doctest::Approx(m.value));
  }
  CHECK(stochastically_stable_set(d) == std::vector<ProfileId>{ProfileId{3}});

  const ResistanceDigraph single(1, {});
  const auto lone = min_resistance(single, ProfileId{0});
  CHECK(lone.value == 0.0);
  CHECK(lone.witness.arrows.empty());
  CHECK(min_resistance_enumerated(single, ProfileId{0}).value == 0.0);
}

TEST_CASE("arborescence minimum equals enumeration minimum") {
  testing::Engine rng(1234);
  for (int trial = 0; trial < 60; ++trial) {
    const auto d = testing::random_one_step_digraph(rng, 9);
    for (std::size_t s = 0; s < d.node_count(); ++s) {
      for (Weighting w : {Weighting::Coefficient, Weighting::Resistance}) {
        const auto fast = min_resistance(d, ProfileId{s}, w);
        const auto brute = min_resistance_enumerated(d, ProfileId{s}, w);
        REQUIRE(std::abs(fast.value - brute.value) <= 1e-12);
        REQUIRE(is_wgraph(fast.witness, d.node_count()));
        REQUIRE(std::abs(graph_cost(d, fast.witness, w) - fast.value) <= 1e-12);
      }
    }
  }
}

TEST_CASE("unreachable root is a domain error") {
  const ResistanceDigraph d(3, {edge(0, 1, 0.5), edge(1, 0, 0.5), edge(2, 0, 0.5)});
  CHECK_THROWS_AS(min_resistance(d, ProfileId{2}), DomainError);
  CHECK_NOTHROW(min_resistance(d, ProfileId{0}));
}

TEST_CASE("stable set tolerance") {
  std::vector<MinResistance> r(3);
  r[0].root = ProfileId{0};
  r[0].value = 2.0;
  r[1].root = ProfileId{1};
  r[1].value = 2.0 * (1 + 1e-12);
  r[2].root = ProfileId{2};
  r[2].value = 2.0 * (1 + 1e-6);
  CHECK(stochastically_stable_set(r) == std::vector<ProfileId>{ProfileId{0}, ProfileId{1}});
  CHECK(stochastically_stable_set(r, 1e-5).size() == 3);
  CHECK_THROWS_AS(stochastically_stable_set(r, 0.0), UsageError);
}

TEST_CASE("stationary distribution of small chains") {
  const double p = 0.3, q = 0.1;
  const ResistanceDigraph two(2, {edge(0, 1, p), edge(1, 0, q)});
  for (ChainMode mode : {ChainMode::TreeSum, ChainMode::Solver}) {
    const auto pi = fw_stationary(two, mode);
    CHECK(pi[0] == doctest::Approx(q / (p + q)).epsilon(1e-14));
    CHECK(pi[1] == doctest::Approx(p / (p + q)).epsilon(1e-14));
    const auto uniform = fw_stationary(complete(5, 0.01, 0.2), mode);
    for (double v : uniform) CHECK(v == doctest::Approx(0.2).epsilon(1e-13));
  }
  CHECK_THROWS_AS(fw_stationary(complete(3, 0.9), ChainMode::Solver), ParameterError);
  CHECK_NOTHROW(fw_stationary(complete(3, 0.9), ChainMode::TreeSum));
  CHECK(fw_stationary(ResistanceDigraph(1, {}), ChainMode::Solver) == std::vector<double>{1.0});
}

TEST_CASE("tree-sum, elimination, and dense solve agree") {
  testing::Engine rng(55);
  for (int trial = 0; trial < 40; ++trial) {
    const Game g = testing::random_game(rng, 3, 3, 8);
    const Params params = testing::random_params(rng, g, trial % 2 ? Mode::PLA : Mode::APLA);
    const auto d = build_digraph(g, params);
    const auto tree = fw_stationary(d, ChainMode::TreeSum);
    const auto solver = fw_stationary(d, ChainMode::Solver);
    const auto dense = testing::dense_stationary(d);
    double total = 0.0;
    for (std::size_t s = 0; s < d.node_count(); ++s) {
      REQUIRE(tree[s] >= 0.0);
      REQUIRE(std::abs(tree[s] - solver[s]) <= 1e-9);
      REQUIRE(std::abs(tree[s] - dense[s]) <= 1e-9);
      total += tree[s];
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("pruned enumeration minimum equals the minimum over every W-graph") {
  testing::Engine rng(4321);
  for (int trial = 0; trial < 25; ++trial) {
    const auto d = testing::random_one_step_digraph(rng, 7);
    for (std::size_t s = 0; s < d.node_count(); ++s) {
      const std::vector<ProfileId> root{ProfileId{s}};
      double plain = std::numeric_limits<double>::infinity();
      for (const auto& g : enumerate_wgraphs(d, root)) plain = std::min(plain, graph_cost(d, g, Weighting::Coefficient));
      REQUIRE(std::abs(min_resistance_enumerated(d, ProfileId{s}).value - plain) <= 1e-12);
    }
  }
}

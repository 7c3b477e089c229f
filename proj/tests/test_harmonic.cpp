#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "pathmin/bench.hpp"
#include "pathmin/harmonic.hpp"
#include "test_support.hpp"

using namespace pathmin;
using pathmin::testing::random_walk;

namespace {

constexpr double kPi = std::numbers::pi;

void expect_probability_vector(const EdgeMeasures& m) {
  EXPECT_NEAR(m.sum(), 1.0, 1e-10);
  for (double w : m.weights) EXPECT_GE(w, 0.0);
}

}  // namespace

TEST(EdgeMeasures, ArcsineOnDyadicPrevertices) {
  const auto p = WalkPolygon::flat({0.0, 0.25, 0.5, 0.75, 1.0});
  const std::vector<double> z = {0.0, 0.25, 0.5, 0.75, 1.0};
  const auto m = edge_measures_from_prevertices(p, z);
  const double expect[] = {1.0 / 3.0, 1.0 / 6.0, 1.0 / 6.0, 1.0 / 3.0};
  for (int k = 0; k < 4; ++k) EXPECT_NEAR(m.weights[k], expect[k], 1e-8);
  expect_probability_vector(m);
  const auto g = edge_measures_from_gaps(p, prevertex_gaps(z));
  for (int k = 0; k < 4; ++k) EXPECT_NEAR(g.weights[k], expect[k], 1e-14);
}

TEST(EdgeMeasures, FlatWalkGivesTimeIncrements) {
  const std::vector<double> t = {0.0, 0.1, 0.15, 0.5, 0.83, 1.0};
  const auto p = WalkPolygon::flat(t);
  for (auto kind : {SolverKind::full, SolverKind::perturbative}) {
    const auto m = edge_measures(p, kind);
    for (std::size_t k = 0; k + 1 < t.size(); ++k) EXPECT_NEAR(m.weights[k], t[k + 1] - t[k], 1e-8);
    EXPECT_EQ(m.t_left[2], 0.15);
    EXPECT_EQ(m.t_right[2], 0.5);
    EXPECT_TRUE(m.stderrs.empty());
  }
}

TEST(EdgeMeasures, SingleEdge) {
  const auto m = edge_measures(WalkPolygon::flat({0.0, 1.0}), SolverKind::full);
  ASSERT_EQ(m.size(), 1u);
  EXPECT_EQ(m.weights[0], 1.0);
}

TEST(EdgeMeasures, NormalizedOnRandomWalks) {
  for (std::uint64_t s = 0; s < 40; ++s) {
    const auto p = random_walk(s, 2 + s % 10, 0.2 + 0.05 * static_cast<double>(s % 20));
    expect_probability_vector(edge_measures(p, SolverKind::full));
    expect_probability_vector(edge_measures(p.with_beta(0.01), SolverKind::perturbative));
  }
}

TEST(EdgeMeasures, GapsAndPrevertexRoutesAgree) {
  const auto p = random_walk(31, 7, 1.0);
  const auto sol = solve_prevertices_full(p);
  const auto a = edge_measures_from_prevertices(p, sol.z);
  const auto b = edge_measures_from_gaps(p, sol.gaps);
  for (std::size_t k = 0; k < a.size(); ++k) EXPECT_NEAR(a.weights[k], b.weights[k], 1e-12);
}

TEST(EdgeMeasures, TimeReflectionReversesWeights) {
  for (std::uint64_t s = 0; s < 5; ++s) {
    const auto p = random_walk(40 + s, 6, 1.0);
    const auto a = edge_measures(p, SolverKind::full);
    const auto b = edge_measures(p.time_reversed(), SolverKind::full);
    for (std::size_t k = 0; k < a.size(); ++k) {
      EXPECT_NEAR(a.weights[k], b.weights[a.size() - 1 - k], 1e-8) << s << " " << k;
    }
  }
}

TEST(EdgeMeasures, PerturbativeAgreesWithFullForSmallBeta) {
  for (std::uint64_t s = 0; s < 100; ++s) {
    const auto base = random_walk(700 + s, 2 + s % 8, 1.0);
    for (double beta : {0.05, 0.01}) {
      const auto p = base.with_beta(beta);
      const auto a = edge_measures(p, SolverKind::full);
      const auto b = edge_measures(p, SolverKind::perturbative);
      for (std::size_t k = 0; k < a.size(); ++k) {
        ASSERT_LE(std::abs(a.weights[k] - b.weights[k]), 20.0 * beta * beta) << s << " " << beta;
      }
    }
  }
}

TEST(EdgeMeasures, LoweringAVertexAttractsMass) {
  CounterRng rng(5);
  for (std::uint64_t s = 0; s < 100; ++s) {
    const auto p = random_walk(900 + s, 5, 1.0);
    const std::size_t j = 1 + s % 4;
    std::vector<double> w(p.values().begin(), p.values().end());
    w[j] -= 0.05 + 0.5 * rng.uniform();
    const WalkPolygon q(std::vector<double>(p.times().begin(), p.times().end()), w, 1.0);
    const auto a = edge_measures(p, SolverKind::full);
    const auto b = edge_measures(q, SolverKind::full);
    EXPECT_GE(b.weights[j - 1] + b.weights[j], a.weights[j - 1] + a.weights[j] - 1e-12) << s;
  }
}

TEST(ChooseEdge, MaxMeasure) {
  CounterRng rng(1);
  const std::vector<double> w = {0.2, 0.5, 0.3};
  EXPECT_EQ(choose_edge(w, Strategy::max_measure, rng), 1u);
  const std::vector<double> u = {0.25, 0.25, 0.25, 0.25};
  EXPECT_EQ(choose_edge(u, Strategy::max_measure, rng), 0u);
  const std::vector<double> scaled = {2.0, 5.0, 3.0};
  EXPECT_EQ(choose_edge(scaled, Strategy::max_measure, rng), 1u);
  EXPECT_EQ(rng.draws(), 0u);
}

TEST(ChooseEdge, SampleMeasureFrequencies) {
  CounterRng rng(2);
  const std::vector<double> w = {0.2, 0.5, 0.3};
  const std::size_t n = 100000;
  std::vector<double> counts(3, 0.0);
  for (std::size_t i = 0; i < n; ++i) counts[choose_edge(w, Strategy::sample_measure, rng)] += 1.0;
  for (int k = 0; k < 3; ++k) {
    EXPECT_NEAR(counts[k] / n, w[k], 3.0 * std::sqrt(w[k] * (1.0 - w[k]) / n)) << k;
  }
}

TEST(HarmonicSearch, FlatStrategyMatchesHandTrace) {
  // At beta = 0 the weights are the time increments, so max_measure bisects
  // the widest edge, leftmost first.
  const std::size_t budget = 20;
  std::vector<double> knots = {0.0, 1.0};
  std::vector<double> expected;
  for (std::size_t q = 0; q < budget; ++q) {
    std::size_t best = 0;
    for (std::size_t k = 1; k + 1 < knots.size(); ++k) {
      if (knots[k + 1] - knots[k] > knots[best + 1] - knots[best]) best = k;
    }
    const double mid = 0.5 * (knots[best] + knots[best + 1]);
    expected.push_back(mid);
    knots.insert(knots.begin() + static_cast<std::ptrdiff_t>(best) + 1, mid);
  }
  auto path = new_bridge(3, true);
  HmcParams params;
  params.beta = 0.0;
  const auto r = harmonic_bisection_search(path, budget, params);
  EXPECT_EQ(r.query_times, expected);
  EXPECT_EQ(r.queries, budget + 2);
  ASSERT_GE(expected.size(), 3u);
  EXPECT_EQ(expected[0], 0.5);
  EXPECT_EQ(expected[1], 0.25);
  EXPECT_EQ(expected[2], 0.75);
}

TEST(HarmonicSearch, BudgetOneIsBestOfThree) {
  auto path = new_bridge(8, true);
  const auto r = harmonic_bisection_search(path, 1, HmcParams{});
  EXPECT_EQ(r.min_value, std::min({0.0, path.query(0.5)}));
  EXPECT_EQ(r.queries, 3u);
}

TEST(HarmonicSearch, BestPointIsAQueriedPoint) {
  for (auto strategy : {Strategy::max_measure, Strategy::sample_measure}) {
    auto path = new_bridge(12, true);
    HmcParams params;
    params.strategy = strategy;
    params.seed = 4;
    const auto r = harmonic_bisection_search(path, 15, params);
    EXPECT_EQ(path.query(r.argmin_t), r.min_value);
    for (auto [t, v] : path.points()) EXPECT_GE(v, r.min_value);
    EXPECT_EQ(path.size(), 17u);
    EXPECT_EQ(r.params.value("solver_fallbacks", -1), 0);
  }
}

TEST(HarmonicSearch, ReproducibleAndOracleOverloadAgrees) {
  HmcParams params;
  params.strategy = Strategy::sample_measure;
  params.seed = 9;
  auto a = new_bridge(21, true);
  auto b = new_bridge(21, true);
  const auto ra = harmonic_bisection_search(a, 12, params);
  const auto rb = harmonic_bisection_search(b, 12, params);
  EXPECT_EQ(ra.query_times, rb.query_times);
  auto c = new_bridge(21, true);
  const auto rc = harmonic_bisection_search([&c](double t) { return c.query(t); }, 12, params);
  EXPECT_EQ(ra.query_times, rc.query_times);
  EXPECT_EQ(ra.min_value, rc.min_value);
}

TEST(HarmonicSearch, RejectsUnpinnedPaths) {
  auto path = new_bridge(1, false);
  EXPECT_THROW(harmonic_bisection_search(path, 3, HmcParams{}), std::invalid_argument);
  EXPECT_THROW(random_bisection_search([](double t) { return t; }, 3, 1), std::invalid_argument);
  auto pinned = new_bridge(1, true);
  EXPECT_THROW(harmonic_bisection_search(pinned, 0, HmcParams{}), std::invalid_argument);
}

TEST(RandomBisection, StructureAndDeterminism) {
  auto a = new_bridge(2, true);
  auto b = new_bridge(2, true);
  const auto ra = random_bisection_search(a, 30, 5);
  const auto rb = random_bisection_search(b, 30, 5);
  EXPECT_EQ(ra.query_times, rb.query_times);
  EXPECT_EQ(ra.queries, 32u);
  EXPECT_EQ(ra.query_times.front(), 0.5);
  EXPECT_EQ(a.size(), 32u);
}

TEST(HittingOracle, TwoEqualFlatEdges) {
  HittingOracleParams hp;
  hp.walkers = 20000;
  hp.seed = 1;
  const auto m = mc_hitting_oracle(WalkPolygon::flat({0.0, 0.5, 1.0}), hp);
  expect_probability_vector(m);
  for (std::size_t k = 0; k < 2; ++k) EXPECT_NEAR(m.weights[k], 0.5, 3.0 * m.stderrs[k]);
}

TEST(HittingOracle, FlatDyadicWalk) {
  HittingOracleParams hp;
  hp.walkers = 20000;
  hp.seed = 2;
  const auto m = mc_hitting_oracle(WalkPolygon::flat({0.0, 0.25, 0.5, 0.75, 1.0}), hp);
  for (std::size_t k = 0; k < 4; ++k) EXPECT_NEAR(m.weights[k], 0.25, 3.0 * m.stderrs[k]);
}

TEST(HittingOracle, MatchesAnalyticMeasures) {
  const auto p = random_walk(77, 5, 0.5);
  const auto a = edge_measures(p, SolverKind::full);
  HittingOracleParams hp;
  hp.walkers = 20000;
  hp.seed = 3;
  const auto m = mc_hitting_oracle(p, hp);
  for (std::size_t k = 0; k < a.size(); ++k) {
    EXPECT_NEAR(m.weights[k], a.weights[k], 4.0 * std::max(m.stderrs[k], 1e-3)) << k;
  }
}

TEST(HittingOracle, DeterministicAcrossThreadCounts) {
  const auto p = random_walk(5, 4, 1.0);
  HittingOracleParams hp;
  hp.walkers = 2000;
  hp.seed = 4;
  const auto a = mc_hitting_oracle(p, hp);
  hp.threads = 3;
  const auto b = mc_hitting_oracle(p, hp);
  EXPECT_EQ(a.weights, b.weights);
}

TEST(HittingOracle, InvalidParams) {
  HittingOracleParams hp;
  hp.dt = 0.0;
  EXPECT_THROW(mc_hitting_oracle(WalkPolygon::flat({0.0, 1.0}), hp), std::invalid_argument);
  hp = {};
  hp.depth = -1.0;
  EXPECT_THROW(mc_hitting_oracle(WalkPolygon::flat({0.0, 1.0}), hp), std::invalid_argument);
}

TEST(FoldUnit, TriangleWave) {
  EXPECT_EQ(fold_unit(0.3), 0.3);
  EXPECT_NEAR(fold_unit(-0.3), 0.3, 1e-15);
  EXPECT_NEAR(fold_unit(1.2), 0.8, 1e-15);
  EXPECT_NEAR(fold_unit(2.3), 0.3, 1e-15);
  EXPECT_NEAR(fold_unit(-1.7), 0.3, 1e-15);
}

TEST(WalkCsv, ParsesAndValidates) {
  std::stringstream ok("t,value\n0,0\n0.4,-1.5\n1,0\n");
  const auto p = read_walk_csv(ok, 2.0);
  EXPECT_EQ(p.edges(), 2u);
  EXPECT_EQ(p.height(1), -3.0);
  const auto bad = [](const std::string& text, const std::string& where) {
    std::stringstream ss(text);
    try {
      read_walk_csv(ss, 1.0, "w.csv");
      ADD_FAILURE() << "accepted " << text;
    } catch (const std::invalid_argument& e) {
      EXPECT_NE(std::string(e.what()).find(where), std::string::npos) << e.what();
    }
  };
  bad("t,value\n0,0\n0.5,x\n1,0\n", "w.csv:3");
  bad("t,value\n0,0\n0.5,1\n0.4,1\n1,0\n", "w.csv:4");
  bad("t,value\n0,0\n0.5,1\n1,0.2\n", "w.csv");
  bad("time,w\n0,0\n1,0\n", "w.csv:1");
}

TEST(WalkCsv, EdgeMeasuresCsvHeader) {
  const auto m = edge_measures(WalkPolygon::flat({0.0, 0.5, 1.0}), SolverKind::full);
  std::stringstream out;
  write_edge_measures_csv(m, out);
  std::string header;
  std::getline(out, header);
  EXPECT_EQ(header, "k,t_left,t_right,weight,stderr");
  std::string row;
  std::getline(out, row);
  EXPECT_EQ(row.back(), ',');
}

TEST(StrategyNames, RoundTrip) {
  for (auto s : {Strategy::max_measure, Strategy::sample_measure}) {
    EXPECT_EQ(strategy_from_string(to_string(s)), s);
  }
  EXPECT_THROW(strategy_from_string("greedy"), std::invalid_argument);
}

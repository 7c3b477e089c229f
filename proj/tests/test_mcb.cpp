#include <gtest/gtest.h>

#include <boost/math/distributions/chi_squared.hpp>

#include <algorithm>
#include <cmath>
#include <set>

#include "pathmin/mcb.hpp"
#include "pathmin/path_sim.hpp"
#include "test_support.hpp"

using namespace pathmin;

namespace {

// Interval halving driven by the leading bits of one 64-bit word.
double halving_midpoint(std::uint64_t word, int r) {
  double t0 = 0.0;
  double t1 = 1.0;
  for (int d = 0; d < r; ++d) {
    const bool bit = (word >> (63 - d)) & 1u;
    const double mid = 0.5 * (t0 + t1);
    if (bit) {
      t0 = mid;
    } else {
      t1 = mid;
    }
  }
  return 0.5 * (t0 + t1);
}

}  // namespace

TEST(McbDescent, MatchesIndependentHalvingForEveryLeaf) {
  for (int r = 1; r <= 6; ++r) {
    std::set<double> seen;
    for (std::uint64_t s = 0; seen.size() < (std::size_t{1} << r); ++s) {
      ASSERT_LT(s, 100000u) << "r=" << r;
      CounterRng probe(s);
      const std::uint64_t word = probe();
      CounterRng rng(s);
      BitSource bits(rng);
      const double t = mcb_descent(r, bits);
      EXPECT_EQ(t, halving_midpoint(word, r));
      EXPECT_EQ(bits.consumed(), static_cast<std::uint64_t>(r));
      // Odd multiple of 2^-(r+1): strictly inside one cell of level r.
      const double scaled = std::ldexp(t, r + 1);
      EXPECT_EQ(scaled, std::floor(scaled));
      EXPECT_EQ(std::fmod(scaled, 2.0), 1.0);
      seen.insert(t);
    }
  }
}

TEST(McbDescent, DocumentedExamples) {
  // r = 1, bit 0 -> 1/4; r = 2, bits 1,1 -> 7/8.
  EXPECT_EQ(halving_midpoint(0, 1), 0.25);
  EXPECT_EQ(halving_midpoint(~std::uint64_t{0}, 2), 0.875);
  bool found_quarter = false;
  bool found_seven_eighths = false;
  for (std::uint64_t s = 0; s < 64 && !(found_quarter && found_seven_eighths); ++s) {
    CounterRng probe(s);
    const std::uint64_t top = probe() >> 62;
    McbParams p1{.l = 4, .r = 1, .g = 1, .seed = 0};
    McbParams p2{.l = 4, .r = 2, .g = 1, .seed = 0};
    CounterRng a(s);
    CounterRng b(s);
    const double t1 = mcb_descent(p1, a);
    const double t2 = mcb_descent(p2, b);
    if ((top >> 1) == 0) {
      EXPECT_EQ(t1, 0.25);
      found_quarter = true;
    }
    if (top == 3) {
      EXPECT_EQ(t2, 0.875);
      found_seven_eighths = true;
    }
  }
  EXPECT_TRUE(found_quarter);
  EXPECT_TRUE(found_seven_eighths);
}

TEST(McbLeafNode, NearestLeftAndDirectMidpoint) {
  EXPECT_EQ(mcb_leaf_node(0, 1, 3), 2u);   // t = 1/4 on a level-3 grid
  EXPECT_EQ(mcb_leaf_node(3, 2, 3), 7u);   // t = 7/8
  EXPECT_EQ(mcb_leaf_node(5, 3, 3), 5u);   // t = 11/16 -> node 5/8
  for (int l = 1; l <= 6; ++l) {
    for (int r = 1; r <= l; ++r) {
      for (std::uint64_t j = 0; j < (std::uint64_t{1} << r); ++j) {
        const double mid = std::ldexp(static_cast<double>(2 * j + 1), -(r + 1));
        const std::size_t node = mcb_leaf_node(j, r, l);
        EXPECT_EQ(node, static_cast<std::size_t>(std::floor(std::ldexp(mid, l))));
      }
    }
  }
}

TEST(McbSearch, SingleDescentCostsThreeQueries) {
  const auto g = fill_dyadic(1, 6);
  McbTrace trace;
  const auto r = mcb_search(g, McbParams{.l = 6, .r = 6, .g = 1, .seed = 3}, &trace);
  EXPECT_EQ(r.queries, 3u);
  EXPECT_LE(trace.distinct_nodes, 3u);
  EXPECT_LE(r.min_value, g.value(0));
}

TEST(McbSearch, QueriesAndBitsAreStructural) {
  const auto g = fill_dyadic(2, 10);
  McbTrace trace;
  const McbParams p{.l = 10, .r = 7, .g = 1024, .seed = 9};
  const auto r = mcb_search(g, p, &trace);
  EXPECT_EQ(r.queries, 1026u);
  EXPECT_EQ(trace.bits_consumed, p.g * static_cast<std::uint64_t>(p.r));
  EXPECT_EQ(r.method, "mcb");
  ASSERT_TRUE(r.error.has_value());
  EXPECT_GE(*r.error, 0.0);
  EXPECT_EQ(*r.error, r.min_value - g.grid_min().value);
  EXPECT_EQ(g.at(r.argmin_t), r.min_value);
}

TEST(McbSearch, RunningMinimumIsNonincreasing) {
  const auto g = fill_dyadic(4, 8);
  McbTrace trace;
  mcb_search(g, McbParams{.l = 8, .r = 8, .g = 500, .seed = 1}, &trace);
  ASSERT_EQ(trace.running_min.size(), 500u);
  for (std::size_t i = 1; i < trace.running_min.size(); ++i) {
    EXPECT_LE(trace.running_min[i], trace.running_min[i - 1]);
  }
}

TEST(McbSearch, CoverageIsUniform) {
  const int l = 6;
  const std::uint64_t cells = std::uint64_t{1} << l;
  const auto g = fill_dyadic(5, l);
  McbTrace trace;
  mcb_search(g, McbParams{.l = l, .r = l, .g = 100 * cells, .seed = 12}, &trace);
  const double expected = 100.0;
  double chi2 = 0.0;
  for (auto v : trace.leaf_visits) chi2 += (v - expected) * (v - expected) / expected;
  const boost::math::chi_squared dist(static_cast<double>(cells - 1));
  EXPECT_GT(boost::math::cdf(boost::math::complement(dist, chi2)), 1e-3) << chi2;
}

TEST(McbSearch, ExhaustiveVisitFindsGridMinimum) {
  const int l = 7;
  for (std::uint64_t s = 0; s < 10; ++s) {
    const auto g = fill_dyadic(s, l);
    McbTrace trace;
    const auto r = mcb_search(g, McbParams{.l = l, .r = l, .g = 4096, .seed = s}, &trace);
    const bool all = std::all_of(trace.leaf_visits.begin(), trace.leaf_visits.end(),
                                 [](std::uint64_t v) { return v > 0; });
    if (all) {
      EXPECT_EQ(r.min_value, g.grid_min().value);
      EXPECT_EQ(*r.error, 0.0);
    }
  }
}

TEST(McbSearch, DeterministicGivenSeed) {
  const auto g = fill_dyadic(6, 9);
  const McbParams p{.l = 9, .r = 9, .g = 300, .seed = 77};
  const auto a = mcb_search(g, p);
  const auto b = mcb_search(g, p);
  EXPECT_EQ(a.min_value, b.min_value);
  EXPECT_EQ(a.argmin_t, b.argmin_t);
}

TEST(McbSearch, InvalidParams) {
  const auto g = fill_dyadic(6, 5);
  EXPECT_THROW(mcb_search(g, McbParams{.l = 6, .r = 6, .g = 10}), std::invalid_argument);
  EXPECT_THROW(mcb_search(g, McbParams{.l = 5, .r = 6, .g = 10}), std::invalid_argument);
  EXPECT_THROW(mcb_search(g, McbParams{.l = 5, .r = 5, .g = 0}), std::invalid_argument);
  EXPECT_THROW(mcb_search_cauchy(g, McbParams{.l = 5, .r = 5, .g = 10}), std::invalid_argument);
}

TEST(McbCauchy, StructureAndEndpointBound) {
  const auto g = simulate_cauchy(3, 10);
  const auto r = mcb_search_cauchy(g, McbParams{.l = 10, .r = 10, .g = 1024, .seed = 4});
  EXPECT_EQ(r.queries, 1026u);
  EXPECT_EQ(r.method, "mcb-cauchy");
  EXPECT_LE(r.min_value, g.value(0));
}

TEST(McbCauchy, ExhaustiveRegime) {
  const int l = 8;
  int exact = 0;
  for (std::uint64_t s = 0; s < 100; ++s) {
    const auto g = simulate_cauchy(derive_seed(50, s), l);
    const auto r = mcb_search_cauchy(g, McbParams{.l = l, .r = l, .g = 16u << l, .seed = s});
    exact += r.min_value == g.grid_min().value;
  }
  EXPECT_GE(exact, 99);
}

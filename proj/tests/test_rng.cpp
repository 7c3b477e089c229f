#include <gtest/gtest.h>

#include <cmath>
#include <set>
#include <vector>

#include "pathmin/rng.hpp"
#include "test_support.hpp"

using namespace pathmin;

// Known-answer vectors for Philox4x32-10 published with the Random123 library.
TEST(Philox, KnownAnswerZero) {
  const auto out = philox4x32({0, 0, 0, 0}, {0, 0});
  EXPECT_EQ(out[0], 0x6627e8d5u);
  EXPECT_EQ(out[1], 0xe169c58du);
  EXPECT_EQ(out[2], 0xbc57ac4cu);
  EXPECT_EQ(out[3], 0x9b00dbd8u);
}

TEST(Philox, KnownAnswerOnes) {
  const auto out = philox4x32({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu},
                              {0xffffffffu, 0xffffffffu});
  EXPECT_EQ(out[0], 0x408f276du);
  EXPECT_EQ(out[1], 0x41c83b0eu);
  EXPECT_EQ(out[2], 0xa20bc7c6u);
  EXPECT_EQ(out[3], 0x6d5451fdu);
}

TEST(Philox, KnownAnswerPi) {
  const auto out = philox4x32({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u},
                              {0xa4093822u, 0x299f31d0u});
  EXPECT_EQ(out[0], 0xd16cfe09u);
  EXPECT_EQ(out[1], 0x94fdccebu);
  EXPECT_EQ(out[2], 0x5001e420u);
  EXPECT_EQ(out[3], 0x24126ea1u);
}

TEST(CounterRng, SameSeedSameStream) {
  CounterRng a(42, 3);
  CounterRng b(42, 3);
  for (int i = 0; i < 1000; ++i) ASSERT_EQ(a(), b());
}

TEST(CounterRng, StreamsDiffer) {
  CounterRng a(42, 0);
  CounterRng b(42, 1);
  int equal = 0;
  for (int i = 0; i < 1000; ++i) equal += a() == b();
  EXPECT_EQ(equal, 0);
}

TEST(CounterRng, SubstreamMatchesDirectConstruction) {
  CounterRng base(9, 0);
  base();
  auto sub = base.substream(5);
  CounterRng direct(9, 5);
  for (int i = 0; i < 10; ++i) EXPECT_EQ(sub(), direct());
}

TEST(CounterRng, CountsDraws) {
  CounterRng r(1);
  for (int i = 0; i < 7; ++i) r();
  EXPECT_EQ(r.draws(), 7u);
}

TEST(CounterRng, UniformRange) {
  CounterRng r(7);
  for (int i = 0; i < 100000; ++i) {
    const double u = r.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    const double v = r.uniform_open();
    ASSERT_GT(v, 0.0);
    ASSERT_LT(v, 1.0);
  }
}

TEST(CounterRng, UniformMoments) {
  CounterRng r(11);
  std::vector<double> x(200000);
  for (double& v : x) v = r.uniform();
  const auto m = pathmin::testing::moments(x);
  EXPECT_NEAR(m.mean, 0.5, 4.0 * std::sqrt(1.0 / 12.0 / x.size()));
  EXPECT_NEAR(m.variance, 1.0 / 12.0, 4.0 * std::sqrt(1.0 / 180.0 / x.size()));
}

TEST(CounterRng, NormalMoments) {
  CounterRng r(13);
  std::vector<double> x(200000);
  for (double& v : x) v = r.normal();
  const auto m = pathmin::testing::moments(x);
  EXPECT_NEAR(m.mean, 0.0, 4.0 / std::sqrt(static_cast<double>(x.size())));
  EXPECT_NEAR(m.variance, 1.0, 4.0 * std::sqrt(2.0 / x.size()));
  // Fourth moment of a standard normal is 3; its sampling sd is sqrt(96 / n).
  double m4 = 0.0;
  for (double v : x) m4 += v * v * v * v;
  m4 /= static_cast<double>(x.size());
  EXPECT_NEAR(m4, 3.0, 4.0 * std::sqrt(96.0 / x.size()));
}

TEST(DeriveSeed, DistinctAcrossIndices) {
  std::set<std::uint64_t> seen;
  for (std::uint64_t a = 0; a < 50; ++a) {
    for (std::uint64_t b = 0; b < 50; ++b) seen.insert(derive_seed(1, a, b));
  }
  EXPECT_EQ(seen.size(), 2500u);
  EXPECT_NE(derive_seed(1, 2, 3), derive_seed(1, 3, 2));
  EXPECT_EQ(derive_seed(5, 1), derive_seed(5, 1));
}

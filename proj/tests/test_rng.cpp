#include <gtest/gtest.h>

#include <set>
#include <vector>

#include "hrv/rng.hpp"

using namespace hrv;

// Known-answer vectors from the Random123 distribution (kat_vectors, philox4x32_10).
TEST(Philox, KnownAnswerZero) {
  const auto out = Philox4x32::apply({0, 0, 0, 0}, {0, 0});
  EXPECT_EQ(out[0], 0x6627e8d5u);
  EXPECT_EQ(out[1], 0xe169c58du);
  EXPECT_EQ(out[2], 0xbc57ac4cu);
  EXPECT_EQ(out[3], 0x9b00dbd8u);
}

TEST(Philox, KnownAnswerAllOnes) {
  const auto out = Philox4x32::apply({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu},
                                     {0xffffffffu, 0xffffffffu});
  EXPECT_EQ(out[0], 0x408f276du);
  EXPECT_EQ(out[1], 0x41c83b0eu);
  EXPECT_EQ(out[2], 0xa20bc7c6u);
  EXPECT_EQ(out[3], 0x6d5451fdu);
}

TEST(Philox, KnownAnswerPi) {
  const auto out = Philox4x32::apply({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u},
                                     {0xa4093822u, 0x299f31d0u});
  EXPECT_EQ(out[0], 0xd16cfe09u);
  EXPECT_EQ(out[1], 0x94fdccebu);
  EXPECT_EQ(out[2], 0x5001e420u);
  EXPECT_EQ(out[3], 0x24126ea1u);
}

TEST(PhiloxEngine, SameKeyAndStreamReproduce) {
  PhiloxEngine a(42, 7), b(42, 7);
  for (int i = 0; i < 1000; ++i) ASSERT_EQ(a(), b());
}

TEST(PhiloxEngine, DistinctStreamsDiffer) {
  PhiloxEngine a(42, 7), b(42, 8);
  int equal = 0;
  for (int i = 0; i < 1000; ++i) equal += a() == b();
  EXPECT_EQ(equal, 0);
}

TEST(PhiloxEngine, UniformIsOpenInterval) {
  PhiloxEngine g(1, 1);
  for (int i = 0; i < 100000; ++i) {
    const double u = g.uniform();
    ASSERT_GT(u, 0.0);
    ASSERT_LT(u, 1.0);
  }
}

TEST(PhiloxEngine, UniformMeanAndVariance) {
  PhiloxEngine g(3, 0);
  const int n = 1000000;
  double s = 0, s2 = 0;
  for (int i = 0; i < n; ++i) {
    const double u = uniform_open(g);
    s += u;
    s2 += u * u;
  }
  const double mean = s / n, var = s2 / n - mean * mean;
  // 5 sigma: sd(mean) = sqrt(1/12 / n).
  EXPECT_NEAR(mean, 0.5, 5 * std::sqrt(1.0 / 12 / n));
  EXPECT_NEAR(var, 1.0 / 12, 1e-3);
}

TEST(DeriveEngine, CoordinatesSelectStreams) {
  std::set<std::uint64_t> first;
  for (std::uint64_t a = 0; a < 10; ++a)
    for (std::uint64_t b = 0; b < 10; ++b) {
      auto g = derive_engine(99, {a, b});
      first.insert(g());
    }
  EXPECT_EQ(first.size(), 100u);
  auto x = derive_engine(99, {1, 2}), y = derive_engine(99, {1, 2});
  EXPECT_EQ(x(), y());
  auto z = derive_engine(98, {1, 2});
  auto w = derive_engine(99, {1, 2});
  EXPECT_NE(z(), w());
  // Coordinate lists of different length do not collide by prefix.
  auto p = derive_engine(99, {1}), q = derive_engine(99, {1, 0});
  EXPECT_NE(p(), q());
}

#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "hrv/rng.hpp"
#include "hrv/transforms.hpp"

using namespace hrv;

namespace {
TruncatedSequence random_sequence(PhiloxEngine& g, std::size_t len) {
  std::vector<double> v(len);
  for (double& c : v) c = uniform_open(g) < 0.3 ? 0.0 : 2.0 * uniform_open(g);
  return TruncatedSequence(v);
}
}  // namespace

TEST(Cumsum, Examples) {
  const auto c = cumsum(TruncatedSequence{1, 2, 3});
  EXPECT_EQ(c[0], 1.0);
  EXPECT_EQ(c[1], 3.0);
  EXPECT_EQ(c[2], 6.0);
  EXPECT_EQ(c[3], 6.0);
  EXPECT_EQ(c[63], 6.0);
  EXPECT_EQ(c.depth(), kDefaultTruncationDepth);
  EXPECT_EQ(cumsum(TruncatedSequence{}), TruncatedSequence{});
  EXPECT_EQ(cumsum(TruncatedSequence{0, 0}), TruncatedSequence{});
}

TEST(Cumsum, Nondecreasing) {
  auto g = derive_engine(1, {1});
  for (int n = 0; n < 200; ++n) {
    const auto c = cumsum(random_sequence(g, 1 + n % 10));
    for (std::size_t i = 1; i < c.prefix_size(); ++i) EXPECT_GE(c[i], c[i - 1]);
  }
}

TEST(Cumsum, LipschitzTwo) {
  auto g = derive_engine(2, {2});
  for (int n = 0; n < 1000; ++n) {
    const auto x = random_sequence(g, 1 + n % 16), y = random_sequence(g, 1 + (n * 5) % 16);
    EXPECT_LE(d_inf(cumsum(x), cumsum(y)), 2.0 * d_inf(x, y) + 1e-12);
  }
}

TEST(Proj, Examples) {
  EXPECT_EQ(proj(TruncatedSequence{1, 2, 3}, 2), (FiniteVector{1, 2}));
  EXPECT_EQ(proj(TruncatedSequence{}, 5), (FiniteVector{0, 0, 0, 0, 0}));
  EXPECT_EQ(proj(TruncatedSequence{1}, 1), (FiniteVector{1}));
  EXPECT_THROW(proj(TruncatedSequence{1}, 0), DomainError);
}

TEST(Proj, UniformContinuityWitness) {
  auto g = derive_engine(3, {3});
  int exercised = 0;
  for (int n = 0; n < 2000; ++n) {
    const std::size_t p = 1 + n % 6;
    const double eps = uniform_open(g);
    const auto x = random_sequence(g, 10);
    std::vector<double> y(x.prefix().begin(), x.prefix().end());
    const double scale = n % 2 ? std::ldexp(eps, -static_cast<int>(p)) : 0.5;
    for (double& c : y) c = std::max(0.0, c + scale * (2 * uniform_open(g) - 1));
    const TruncatedSequence ys(y);
    if (d_inf(x, ys) < std::ldexp(eps, -static_cast<int>(p))) {
      ++exercised;
      EXPECT_LE(d_p(proj(x, p), proj(ys, p)), eps);
    }
  }
  EXPECT_GT(exercised, 500);
}

TEST(Polar, Examples) {
  const auto pp = polar(FiniteVector{3, 4});
  EXPECT_DOUBLE_EQ(pp.radius, 5.0);
  EXPECT_DOUBLE_EQ(pp.angle[0], 0.6);
  EXPECT_DOUBLE_EQ(pp.angle[1], 0.8);
  EXPECT_THROW(polar(FiniteVector{0, 0}), DomainError);
}

TEST(Polar, Roundtrip) {
  auto g = derive_engine(4, {4});
  for (int n = 0; n < 1000; ++n) {
    std::vector<double> v(1 + n % 5);
    for (double& c : v) c = 10 * uniform_open(g);
    const FiniteVector x(v);
    const auto pp = polar(x);
    double norm = 0;
    for (double a : pp.angle.coords()) norm += a * a;
    EXPECT_NEAR(std::sqrt(norm), 1.0, 1e-12);
    EXPECT_LE(d_p(polar_inv(pp), x), 1e-12 * (1 + pp.radius));
  }
}

TEST(GPolar, Examples) {
  const auto pp = gpolar(FiniteVector{2, 6}, ConeSpec::axes(2));
  EXPECT_EQ(pp.radius, 2.0);
  EXPECT_EQ(pp.angle, (FiniteVector{1, 3}));
  const auto one = gpolar(FiniteVector{1, 1}, ConeSpec::axes(2));
  EXPECT_EQ(one.radius, 1.0);
  EXPECT_EQ(one.angle, (FiniteVector{1, 1}));
  EXPECT_THROW(gpolar(FiniteVector{3, 0}, ConeSpec::axes(2)), DomainError);
}

TEST(GPolar, RejectsNonHomogeneousCones) {
  EXPECT_THROW(gpolar(FiniteVector{1, 2}, ConeSpec::seq_at_most_j_positive(1)), UnsupportedError);
  EXPECT_THROW(gpolar_inv({1.0, FiniteVector{1, 2}}, ConeSpec::step_at_most_j_jumps(1)),
               UnsupportedError);
}

TEST(GPolar, InverseChecksTheAngle) {
  EXPECT_THROW(gpolar_inv({2.0, FiniteVector{1, 2}}, ConeSpec::origin()), DomainError);
  EXPECT_THROW(gpolar_inv({0.0, FiniteVector{1, 1}}, ConeSpec::axes(2)), DomainError);
}

TEST(GPolar, RoundtripAndClearance) {
  auto g = derive_engine(5, {5});
  for (int n = 0; n < 1000; ++n) {
    const std::size_t p = 2 + n % 4;
    std::vector<double> v(p);
    for (double& c : v) c = 0.01 + 10 * uniform_open(g);
    const FiniteVector x(v);
    for (const auto& cone : {ConeSpec::origin(), ConeSpec::axes(p), ConeSpec::at_most_j_positive(p - 1)}) {
      const auto pp = gpolar(x, cone);
      EXPECT_NEAR(cone.distance(pp.angle), 1.0, 1e-9);
      EXPECT_LE(d_p(gpolar_inv(pp, cone), x), 1e-9);
    }
  }
}

TEST(TM, Examples) {
  const std::vector<double> t{0.5, 0.25};
  const auto f = t_m(TruncatedSequence{2, 1}, t, 2);
  ASSERT_EQ(f.jump_count(), 2u);
  EXPECT_EQ(f.jumps()[0], (Jump{0.25, 1.0}));
  EXPECT_EQ(f.jumps()[1], (Jump{0.5, 2.0}));
  EXPECT_EQ(f.base(), 0.0);

  const std::vector<double> t3{0.1, 0.2, 0.3};
  EXPECT_EQ(t_m(TruncatedSequence{}, t3, 3).jump_count(), 0u);

  const std::vector<double> dup{0.3, 0.3};
  EXPECT_THROW(t_m(TruncatedSequence{1, 1}, dup, 2), DomainError);
}

TEST(TM, Preconditions) {
  const std::vector<double> t{0.5, 0.25};
  EXPECT_THROW(t_m(TruncatedSequence{1, 2}, t, 2), DomainError);  // increasing sizes
  EXPECT_THROW(t_m(TruncatedSequence{2, 1}, t, 3), DimensionError);
  const std::vector<double> bad{0.0, 0.5};
  EXPECT_THROW(t_m(TruncatedSequence{2, 1}, bad, 2), DomainError);
  // Duplicates past m are allowed.
  const std::vector<double> late{0.2, 0.4, 0.4};
  EXPECT_NO_THROW(t_m(TruncatedSequence{3, 2, 1}, late, 2));
}

TEST(TM, JumpCountAndMonotonicity) {
  auto g = derive_engine(6, {6});
  for (int n = 0; n < 500; ++n) {
    const std::size_t m = 1 + n % 6;
    std::vector<double> s(m), t(m);
    for (double& c : s) c = uniform_open(g) < 0.3 ? 0.0 : uniform_open(g);
    std::sort(s.begin(), s.end(), std::greater<>());
    for (double& u : t) u = uniform_open(g);
    const auto f = t_m(TruncatedSequence(s), t, m);
    EXPECT_EQ(f.jump_count(),
              static_cast<std::size_t>(std::count_if(s.begin(), s.end(), [](double c) { return c > 0; })));
    double prev = f(0.0);
    for (int k = 1; k <= 100; ++k) {
      const double v = f(k / 100.0);
      EXPECT_GE(v, prev);
      prev = v;
    }
  }
}

TEST(Scaling, Examples) {
  EXPECT_EQ(apply_scaling(ScalarAction::standard(), 2, FiniteVector{1, 3}), (FiniteVector{2, 6}));
  EXPECT_EQ(apply_scaling(ScalarAction::second_coord_only(), 2, FiniteVector{1, 3}),
            (FiniteVector{1, 6}));
  const auto pw = apply_scaling(ScalarAction::power_weights({1, 2}), 4, FiniteVector{1, 1});
  EXPECT_DOUBLE_EQ(pw[0], 4.0);
  EXPECT_DOUBLE_EQ(pw[1], 2.0);
  EXPECT_THROW(apply_scaling(ScalarAction::standard(), 0.0, FiniteVector{1}), DomainError);
  EXPECT_THROW(apply_scaling(ScalarAction::power_weights({1, 2}), 2, FiniteVector{1}), DimensionError);
  EXPECT_THROW(apply_scaling(ScalarAction::second_coord_only(), 2, TruncatedSequence{1}), TypeError);
}

TEST(Scaling, StepFunctionsScaleSizesNotTimes) {
  const StepFunction f({{0.2, 1.0}, {0.7, 3.0}}, 0.5);
  const auto g = apply_scaling(ScalarAction::standard(), 2.0, f);
  EXPECT_EQ(g.jumps()[0], (Jump{0.2, 2.0}));
  EXPECT_EQ(g.jumps()[1], (Jump{0.7, 6.0}));
  EXPECT_EQ(g.base(), 1.0);
}

TEST(Scaling, PolarPairRadiusOnly) {
  const PolarPair pp{2.0, FiniteVector{0.6, 0.8}};
  const auto q = apply_scaling(ScalarAction::radius_only(), 3.0, pp);
  EXPECT_EQ(q.radius, 6.0);
  EXPECT_EQ(q.angle, pp.angle);
  EXPECT_THROW(apply_scaling(ScalarAction::second_coord_only(), 3.0, pp), TypeError);
}

TEST(Scaling, GroupLaw) {
  auto g = derive_engine(7, {7});
  const std::vector<ScalarAction> actions{ScalarAction::standard(), ScalarAction::power_weights({0.5, 1, 3}),
                                          ScalarAction::second_coord_only(), ScalarAction::radius_only()};
  for (int n = 0; n < 500; ++n) {
    const FiniteVector x{5 * uniform_open(g), 5 * uniform_open(g), 5 * uniform_open(g)};
    const double a = 0.1 + 5 * uniform_open(g), b = 0.1 + 5 * uniform_open(g);
    for (const auto& act : actions) {
      const auto lhs = apply_scaling(act, a, apply_scaling(act, b, x));
      const auto rhs = apply_scaling(act, a * b, x);
      for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(lhs[i], rhs[i], 1e-12 * (1 + std::abs(rhs[i])));
      EXPECT_EQ(apply_scaling(act, 1.0, x), x);
    }
    const TruncatedSequence s{x[0], x[1]};
    const auto l = apply_scaling(ScalarAction::standard(), a, apply_scaling(ScalarAction::standard(), b, s));
    const auto r = apply_scaling(ScalarAction::standard(), a * b, s);
    EXPECT_NEAR(d_inf(l, r), 0.0, 1e-12);
  }
}

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "hrv/oracles.hpp"
#include "hrv/rng.hpp"

using namespace hrv;

namespace {

using K = LimitMeasureId::Kind;

LimitMeasureId id(K k, std::size_t j, double alpha) { return {k, j, alpha}; }

std::vector<double> random_thresholds(PhiloxEngine& g, std::size_t n, bool nonincreasing) {
  std::vector<double> a(n);
  for (double& v : a) v = 0.2 + 3 * uniform_open(g);
  if (nonincreasing) std::sort(a.begin(), a.end(), std::greater<>());
  return a;
}

}  // namespace

TEST(NuAlpha, Examples) {
  EXPECT_EQ(nu_alpha_tail(1, 1), 1.0);
  EXPECT_EQ(nu_alpha_tail(2, 2), 0.25);
  EXPECT_DOUBLE_EQ(nu_alpha_tail(1, 10), 0.1);
  EXPECT_THROW(nu_alpha_tail(1, 0), DomainError);
  EXPECT_THROW(nu_alpha_tail(1, -1), DomainError);
  EXPECT_THROW(nu_alpha_tail(0, 1), DomainError);
}

TEST(MuIid, Examples) {
  EXPECT_DOUBLE_EQ(mu_iid_rect(1, 1, IidRect{{1, 2}, {2, 4}}), 0.125);
  EXPECT_EQ(mu_iid_rect(1, 1, IidRect{{1, 2, 3}, {2, 4, 1}}), 0.0);
  EXPECT_DOUBLE_EQ(mu_iid_rect(0, 1.5, IidRect{{3}, {4}}), std::pow(4.0, -1.5));
  EXPECT_THROW(mu_iid_rect(1, 1, IidRect{{1}, {2}}), DomainError);
}

TEST(MuSumTail, Examples) {
  EXPECT_DOUBLE_EQ(mu_sum_tail(3, 2, 2), 0.75);
  EXPECT_DOUBLE_EQ(mu_sum_tail(1, 1.3, 2.5), std::pow(2.5, -1.3));
  EXPECT_DOUBLE_EQ(mu_sum_tail(2, 1, 1), 2.0);
  EXPECT_THROW(mu_sum_tail(0, 1, 1), DomainError);
}

TEST(MuPoissonOrdered, Examples) {
  EXPECT_DOUBLE_EQ(mu_poisson_ordered(2, 1, OrderedRect{{2, 1}}), 0.375);
  EXPECT_DOUBLE_EQ(mu_poisson_ordered(2, 1, OrderedRect{{1, 2}}), 0.125);
  EXPECT_DOUBLE_EQ(mu_poisson_ordered(1, 1.7, OrderedRect{{3}}), std::pow(3.0, -1.7));
  EXPECT_THROW(mu_poisson_ordered(0, 1, OrderedRect{{}}), DomainError);
  EXPECT_THROW(mu_poisson_ordered(2, 1, OrderedRect{{1}}), DimensionError);
  EXPECT_THROW(mu_poisson_ordered(1, 1, OrderedRect{{0.0}}), DomainError);
}

TEST(MuLevy, Examples) {
  EXPECT_DOUBLE_EQ(mu_levy_jumpset(2, 1, JumpSet{{2, 1}, 0.0}), 0.375);
  EXPECT_DOUBLE_EQ(mu_levy_jumpset(2, 1, JumpSet{{2, 1}, 0.1}), 0.30375);
  EXPECT_DOUBLE_EQ(mu_levy_jumpset(1, 1, JumpSet{{4}, 0.7}), 0.25);
  EXPECT_THROW(mu_levy_jumpset(2, 1, JumpSet{{2, 1}, 1.0}), DomainError);
  EXPECT_THROW(mu_levy_jumpset(3, 1, JumpSet{{3, 2, 1}, 0.5}), DomainError);
  EXPECT_THROW(mu_levy_jumpset(2, 1, JumpSet{{2, 1}, -0.1}), DomainError);
}

// P[all gaps of j sorted uniforms >= rho] by direct simulation.
TEST(MuLevy, SpacingFactorMatchesSimulation) {
  for (const std::size_t j : {2u, 3u, 4u}) {
    for (const double rho : {0.05, 0.1, 0.2}) {
      if (rho * static_cast<double>(j - 1) >= 1) continue;
      auto g = derive_engine(1, {j, static_cast<std::uint64_t>(rho * 100)});
      const int n = 1000000;
      int ok = 0;
      std::vector<double> u(j);
      for (int i = 0; i < n; ++i) {
        for (double& x : u) x = uniform_open(g);
        std::sort(u.begin(), u.end());
        bool sep = true;
        for (std::size_t k = 1; k < j; ++k) sep = sep && u[k] - u[k - 1] >= rho;
        ok += sep;
      }
      const double p = std::pow(1 - static_cast<double>(j - 1) * rho, static_cast<double>(j));
      EXPECT_NEAR(static_cast<double>(ok) / n, p, 4 * std::sqrt(p * (1 - p) / n)) << j << " " << rho;
    }
  }
}

TEST(MuLevy, ZeroGapEqualsOrdered) {
  auto g = derive_engine(2, {});
  for (int n = 0; n < 200; ++n) {
    const std::size_t j = 1 + n % 5;
    const auto a = random_thresholds(g, j, true);
    const double alpha = 0.5 + 2 * uniform_open(g);
    EXPECT_EQ(mu_levy_jumpset(j, alpha, JumpSet{a, 0.0}), mu_poisson_ordered(j, alpha, OrderedRect{a}));
  }
}

TEST(MuPoissonOrdered, QuadratureMatchesClosedFormOnGrid) {
  const std::vector<double> grid{0.3, 0.5, 0.8, 1.0, 1.3, 1.7, 2.0, 2.6, 3.5, 5.0};
  for (const double alpha : {0.5, 1.0, 1.5, 2.5})
    for (const double x : grid)
      for (const double y : grid) {
        const OrderedRect r{{x, y}};
        EXPECT_NEAR(mu_poisson_ordered_quadrature(2, alpha, r), mu_poisson_ordered(2, alpha, r), 1e-7)
            << alpha << " " << x << " " << y;
      }
}

// Equal thresholds a: the ordered region is a simplex of side a^{-alpha} in
// the substituted coordinates, volume a^{-j alpha} / j!. With the first
// threshold raised to b > a the cap on w_1 removes (C - c)^j / j!.
TEST(MuPoissonOrdered, SimplexClosedForms) {
  for (std::size_t j = 1; j <= 7; ++j) {
    const double alpha = 1.3, a = 0.9;
    const double C = std::pow(a, -alpha);
    const double fact = std::tgamma(static_cast<double>(j) + 1);
    EXPECT_NEAR(mu_poisson_ordered(j, alpha, OrderedRect{std::vector<double>(j, a)}),
                std::pow(C, static_cast<double>(j)) / fact, 1e-12);
    std::vector<double> t(j, a);
    t[0] = 2.0;
    const double c = std::pow(2.0, -alpha);
    const double vol = j == 1 ? c : (std::pow(C, double(j)) - std::pow(C - c, double(j))) / fact;
    EXPECT_NEAR(mu_poisson_ordered(j, alpha, OrderedRect{t}), vol, 1e-12) << j;
  }
}

// Independent j = 3 oracle: integrate the largest point z_1 against its
// density and, for each z_1, the volume of the two lower points in the
// substituted coordinates w = z^{-alpha}, both by the midpoint rule.
TEST(MuPoissonOrdered, ThreeLevelsAgainstNestedIntegral) {
  auto g = derive_engine(3, {});
  for (int n = 0; n < 20; ++n) {
    const auto a = random_thresholds(g, 3, n % 2 == 0);
    const double alpha = 0.7 + uniform_open(g);
    auto inner = [&](double z) {
      const double lo2 = std::max(a[1], a[2]);
      if (z <= lo2) return 0.0;
      const double c2 = std::pow(lo2, -alpha), c3 = std::pow(a[2], -alpha), w0 = std::pow(z, -alpha);
      // w0 <= w2 <= w3, w2 <= c2, w3 <= c3
      auto piece = [&](double w2) { return std::max(0.0, c3 - w2); };
      const int m = 4000;
      double s = 0;
      for (int k = 0; k < m; ++k) {
        const double w2 = w0 + (c2 - w0) * (k + 0.5) / m;
        s += piece(w2) * (c2 - w0) / m;
      }
      return s;
    };
    const double lower = std::max({a[0], a[1], a[2]});
    // z = lower * v^{-1/alpha}, v in (0, 1)
    const int m = 4000;
    double total = 0;
    for (int k = 0; k < m; ++k) {
      const double v = (k + 0.5) / m;
      total += inner(lower * std::pow(v, -1.0 / alpha)) * std::pow(lower, -alpha) / m;
    }
    EXPECT_NEAR(mu_poisson_ordered(3, alpha, OrderedRect{a}), total, 2e-5 * (1 + total)) << n;
  }
}

TEST(Oracles, MonotoneInEveryThreshold) {
  auto g = derive_engine(4, {});
  for (int n = 0; n < 300; ++n) {
    const std::size_t j = 1 + n % 4;
    const double alpha = 0.5 + 2 * uniform_open(g);
    const auto a = random_thresholds(g, j, true);
    const double base_o = mu_poisson_ordered(j, alpha, OrderedRect{a});
    const double base_l = mu_levy_jumpset(j, alpha, JumpSet{a, 0.05});
    std::vector<std::size_t> idx(j + 1);
    for (std::size_t k = 0; k <= j; ++k) idx[k] = k + 1;
    const auto b = random_thresholds(g, j + 1, false);
    const double base_i = mu_iid_rect(j, alpha, IidRect{idx, b});
    for (std::size_t k = 0; k < j; ++k) {
      auto up = a;
      up[k] *= 1.0 + uniform_open(g);
      EXPECT_LE(mu_poisson_ordered(j, alpha, OrderedRect{up}), base_o + 1e-12);
      if (k == 0 || up[k] <= up[k - 1]) {
        EXPECT_LE(mu_levy_jumpset(j, alpha, JumpSet{up, 0.05}), base_l + 1e-12);
      }
    }
    for (std::size_t k = 0; k <= j; ++k) {
      auto up = b;
      up[k] *= 1.5;
      EXPECT_LE(mu_iid_rect(j, alpha, IidRect{idx, up}), base_i);
    }
    EXPECT_LE(mu_sum_tail(j, alpha, 1.5 * a[0]), mu_sum_tail(j, alpha, a[0]));
  }
}

TEST(MuPoissonOrdered, DivergesAsLastThresholdVanishes) {
  for (const std::size_t j : {2u, 3u}) {
    std::vector<double> a(j, 1.0);
    a.back() = 1.0;
    double prev = mu_poisson_ordered(j, 1.0, OrderedRect{a});
    for (const double last : {1e-2, 1e-4, 1e-6}) {
      a.back() = last;
      const double v = mu_poisson_ordered(j, 1.0, OrderedRect{a});
      EXPECT_GT(v, 10 * prev);
      prev = v;
    }
    EXPECT_GT(prev, 1e5);
  }
}

TEST(Homogeneity, Examples) {
  const auto [l1, r1] = homogeneity_check(id(K::MuPoissonOrdered, 2, 1), TestSet::ordered_rect("a", {2, 1}), 2);
  EXPECT_DOUBLE_EQ(l1, 0.09375);
  EXPECT_DOUBLE_EQ(r1, 0.09375);
  const auto [l2, r2] = homogeneity_check(id(K::MuIid, 1, 1), TestSet::iid_rect("b", {1, 2}, {2, 4}), 10);
  EXPECT_NEAR(l2, 1.25e-3, 1e-18);
  EXPECT_NEAR(r2, 1.25e-3, 1e-18);
  const auto [l3, r3] = homogeneity_check(id(K::MuLevy, 2, 1.5), TestSet::jump_set("c", {2, 1}, 0.2), 1);
  EXPECT_EQ(l3, r3);
}

TEST(Homogeneity, AllFamilies) {
  auto g = derive_engine(5, {});
  for (const double alpha : {0.5, 1.0, 2.0})
    for (const double lambda : {0.5, 2.0, 10.0})
      for (int n = 0; n < 20; ++n) {
        const std::size_t j = 1 + n % 4;
        std::vector<std::pair<LimitMeasureId, TestSet>> cases;
        std::vector<std::size_t> idx(j + 1);
        for (std::size_t k = 0; k <= j; ++k) idx[k] = 2 * k + 1;
        cases.emplace_back(id(K::MuIid, j, alpha), TestSet::iid_rect("i", idx, random_thresholds(g, j + 1, false)));
        cases.emplace_back(id(K::MuIid, 0, alpha), TestSet::sum_tail("s", j, 0.5 + uniform_open(g)));
        cases.emplace_back(id(K::MuPoissonOrdered, j, alpha),
                           TestSet::ordered_rect("o", random_thresholds(g, j, n % 2 == 0)));
        const double rho = j == 1 ? 0.5 : 0.5 / static_cast<double>(j - 1);
        cases.emplace_back(id(K::MuLevy, j, alpha), TestSet::jump_set("l", random_thresholds(g, j, true), rho));
        for (const auto& [mid, set] : cases) {
          const auto [lhs, rhs] = homogeneity_check(mid, set, lambda);
          EXPECT_NEAR(lhs, rhs, 1e-10 * std::abs(rhs)) << mid.name() << " " << set.id();
        }
      }
}

TEST(Evaluate, Dispatch) {
  EXPECT_DOUBLE_EQ(evaluate(id(K::MuIid, 1, 1), TestSet::iid_rect("r", {1, 2}, {2, 4})), 0.125);
  EXPECT_DOUBLE_EQ(evaluate(id(K::MuIid, 0, 2), TestSet::sum_tail("s", 3, 2)), 0.75);
  EXPECT_DOUBLE_EQ(evaluate(id(K::MuPoissonOrdered, 2, 1), TestSet::ordered_rect("o", {2, 1})), 0.375);
  EXPECT_DOUBLE_EQ(evaluate(id(K::MuLevy, 2, 1), TestSet::jump_set("l", {2, 1}, 0.1)), 0.30375);
  EXPECT_THROW(evaluate(id(K::MuIid, 1, 1), TestSet::sum_tail("s", 2, 1)), UnsupportedError);
  EXPECT_THROW(evaluate(id(K::MuIid, 1, 1), TestSet::ordered_rect("o", {2, 1})), TypeError);
  EXPECT_THROW(evaluate(id(K::MuLevy, 2, 1), TestSet::ordered_rect("o", {2, 1})), TypeError);
  EXPECT_THROW(evaluate(id(K::MuLevy, 3, 1), TestSet::jump_set("l", {2, 1}, 0.1)), DimensionError);
  EXPECT_THROW(evaluate(id(K::MuPoissonOrdered, 2, 1), TestSet::jump_set("l", {2, 1}, 0.1)), TypeError);
}

TEST(LimitMeasureId, ProductOrder) {
  EXPECT_EQ(id(K::MuIid, 1, 1).product_order(), 2u);
  EXPECT_EQ(id(K::MuPoissonOrdered, 2, 1).product_order(), 2u);
  EXPECT_EQ(id(K::MuLevy, 3, 1).product_order(), 3u);
  EXPECT_EQ(id(K::MuLevy, 3, 1).name(), "MuLevy");
}

// --- test sets --------------------------------------------------------------

TEST(TestSet, Validation) {
  EXPECT_THROW(TestSet::iid_rect("x", {1, 2}, {1}), DimensionError);
  EXPECT_THROW(TestSet::iid_rect("x", {2, 1}, {1, 1}), DomainError);
  EXPECT_THROW(TestSet::iid_rect("x", {0}, {1}), DomainError);
  EXPECT_THROW(TestSet::iid_rect("x", {1}, {0}), DomainError);
  EXPECT_THROW(TestSet::ordered_rect("x", {}), DomainError);
  EXPECT_THROW(TestSet::ordered_rect("x", {1, -1}), DomainError);
  EXPECT_THROW(TestSet::sum_tail("x", 0, 1), DomainError);
  EXPECT_THROW(TestSet::sum_tail("x", 1, 0), DomainError);
  EXPECT_THROW(TestSet::jump_set("x", {1, 2}, 0.1), DomainError);
  EXPECT_THROW(TestSet::jump_set("x", {2, 1}, 1.0), DomainError);
  EXPECT_THROW(TestSet::jump_set("x", {3, 2, 1}, 0.5), DomainError);
  EXPECT_NO_THROW(TestSet::jump_set("x", {3, 2, 1}, 0.49));
  EXPECT_NO_THROW(TestSet::jump_set("x", {3}, 0.99));
}

TEST(TestSet, ClearanceScaledShifted) {
  const auto s = TestSet::ordered_rect("o", {2, 1});
  EXPECT_EQ(s.clearance(), 1.0);
  EXPECT_EQ(s.order(), 2u);
  EXPECT_EQ(TestSet::sum_tail("s", 4, 0.7).clearance(), 0.7);
  EXPECT_EQ(TestSet::sum_tail("s", 4, 0.7).order(), 1u);
  const auto& sc = std::get<OrderedRect>(s.scaled(3).family());
  EXPECT_EQ(sc.thresholds, (std::vector<double>{6, 3}));
  const auto& sh = std::get<OrderedRect>(s.shifted(-0.5).family());
  EXPECT_EQ(sh.thresholds, (std::vector<double>{1.5, 0.5}));
  EXPECT_THROW(s.shifted(-1.0), DomainError);
  EXPECT_THROW(s.scaled(0), DomainError);
  EXPECT_EQ(s.family_name(), "OrderedRect");
  EXPECT_EQ(s.scaled(2).id(), "o");
}

TEST(TestSet, FlatMembership) {
  const std::vector<double> x{5, 1, 9};
  EXPECT_TRUE(TestSet::iid_rect("r", {1, 3}, {2, 4}).contains(x));
  EXPECT_FALSE(TestSet::iid_rect("r", {1, 3}, {2, 4}).contains(x, 2.5));
  EXPECT_FALSE(TestSet::iid_rect("r", {2}, {1}).contains(x));  // strict
  EXPECT_THROW(TestSet::iid_rect("r", {4}, {1}).contains(x), DimensionError);
  EXPECT_TRUE(TestSet::sum_tail("s", 2, 5.5).contains(x));
  EXPECT_FALSE(TestSet::sum_tail("s", 2, 6).contains(x));
  EXPECT_TRUE(TestSet::ordered_rect("o", {4, 0.5}).contains(x));
  EXPECT_THROW(TestSet::jump_set("j", {1}, 0).contains(x), TypeError);
}

TEST(TestSet, JumpMembership) {
  const StepFunction f({{0.1, 1.5}, {0.15, 3.0}, {0.6, 2.5}});
  const auto wide = TestSet::jump_set("j", {2, 1}, 0.4);
  EXPECT_TRUE(wide.contains(f));                       // top two at 0.15 and 0.6
  EXPECT_FALSE(TestSet::jump_set("j", {2, 1}, 0.5).contains(f));
  EXPECT_FALSE(TestSet::jump_set("j", {3, 2.6}, 0).contains(f));
  EXPECT_TRUE(TestSet::jump_set("j", {2, 2, 1}, 0).contains(f));
  EXPECT_FALSE(TestSet::jump_set("j", {2, 2, 1}, 0.06).contains(f));
  EXPECT_FALSE(TestSet::jump_set("j", {1, 1, 1, 1}, 0).contains(f));
  EXPECT_FALSE(wide.contains(f, 2.0));
  EXPECT_THROW(TestSet::ordered_rect("o", {1}).contains(f), TypeError);
}

#pragma once

// Fast invariant battery behind `hrv selfcheck`. Every check draws its inputs
// from a fixed seed, so repeated runs are identical.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "hrv/measures.hpp"
#include "hrv/oracles.hpp"
#include "hrv/reference.hpp"
#include "hrv/rng.hpp"
#include "hrv/scaling.hpp"
#include "hrv/spaces.hpp"
#include "hrv/transforms.hpp"

namespace hrv {

struct CheckResult {
  std::string name;
  bool passed = true;
  std::size_t cases = 0;
  std::string detail;  // first failure
};

struct SelfcheckReport {
  std::vector<CheckResult> checks;
  bool ok() const {
    return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.passed; });
  }
  const CheckResult* first_failure() const {
    for (const auto& c : checks)
      if (!c.passed) return &c;
    return nullptr;
  }
};

struct SelfcheckOptions {
  std::uint64_t seed = 20240601;
  /// Oracle under test for homogeneity_check; defaults to evaluate().
  OracleFn oracle;
};

namespace detail {

class Check {
 public:
  explicit Check(std::string name) { result_.name = std::move(name); }
  void expect(bool ok, const std::function<std::string()>& what) {
    ++result_.cases;
    if (!ok && result_.passed) {
      result_.passed = false;
      result_.detail = what();
    }
  }
  CheckResult done() { return std::move(result_); }

 private:
  CheckResult result_;
};

inline std::string fmt(const char* f, double a, double b) {
  char buf[160];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}

// Sparse nonnegative prefix with zeros, values below and above 1.
inline TruncatedSequence random_sequence(PhiloxEngine& rng, std::size_t max_len) {
  const auto len = 1 + static_cast<std::size_t>(uniform_open(rng) * static_cast<double>(max_len));
  std::vector<double> v(std::min(len, max_len));
  for (double& c : v) {
    const double u = uniform_open(rng);
    c = u < 0.2 ? 0.0 : (u < 0.6 ? uniform_open(rng) : 3.0 * uniform_open(rng));
  }
  return TruncatedSequence(std::move(v));
}

inline FiniteVector random_vector(PhiloxEngine& rng, std::size_t p, double scale = 5.0) {
  std::vector<double> v(p);
  for (double& c : v) c = scale * uniform_open(rng);
  return FiniteVector(std::move(v));
}

inline CheckResult check_metric_axioms(PhiloxEngine& rng) {
  Check c("metric_axioms");
  constexpr double tol = 1e-12;
  auto axioms = [&](const char* name, double dxy, double dyx, double dxz, double dzy, double dxx) {
    c.expect(dxy >= 0.0, [&] { return std::string(name) + ": negative distance"; });
    c.expect(std::abs(dxy - dyx) <= tol, [&] { return std::string(name) + ": asymmetric"; });
    c.expect(dxx <= tol, [&] { return std::string(name) + ": d(x,x) != 0"; });
    c.expect(dxy <= dxz + dzy + tol, [&] { return std::string(name) + ": triangle inequality"; });
  };
  for (int n = 0; n < 1000; ++n) {
    const std::size_t p = 1 + n % 6;
    const auto x = random_vector(rng, p), y = random_vector(rng, p), z = random_vector(rng, p);
    axioms("d_p", d_p(x, y), d_p(y, x), d_p(x, z), d_p(z, y), d_p(x, x));
    const auto a = random_sequence(rng, 20), b = random_sequence(rng, 20),
               e = random_sequence(rng, 20);
    axioms("d_inf", d_inf(a, b), d_inf(b, a), d_inf(a, e), d_inf(e, b), d_inf(a, a));
    axioms("d_inf_prime", d_inf_prime(a, b), d_inf_prime(b, a), d_inf_prime(a, e),
           d_inf_prime(e, b), d_inf_prime(a, a));
    c.expect(!(a == b) || d_inf(a, b) == 0.0, [] { return std::string("d_inf: identity"); });
  }
  return c.done();
}

inline CheckResult check_sandwich(PhiloxEngine& rng) {
  Check c("d_inf_sandwich");
  for (int n = 0; n < 1000; ++n) {
    const auto x = random_sequence(rng, 24), y = random_sequence(rng, 24);
    const double lo = d_inf(x, y), mid = d_inf_prime(x, y);
    c.expect(lo <= mid + 1e-12 && mid <= 2.0 * lo + 1e-12,
             [&] { return fmt("d_inf=%.17g d_inf_prime=%.17g", lo, mid); });
  }
  return c.done();
}

inline CheckResult check_cumsum_lipschitz(PhiloxEngine& rng) {
  Check c("cumsum_lipschitz");
  for (int n = 0; n < 1000; ++n) {
    const auto x = random_sequence(rng, 24), y = random_sequence(rng, 24);
    const double lhs = d_inf(cumsum(x), cumsum(y)), rhs = 2.0 * d_inf(x, y);
    c.expect(lhs <= rhs + 1e-12, [&] { return fmt("d(cumsum)=%.17g > 2 d=%.17g", lhs, rhs); });
  }
  return c.done();
}

inline CheckResult check_proj_continuity(PhiloxEngine& rng) {
  Check c("proj_continuity");
  for (int n = 0; n < 1000; ++n) {
    const std::size_t p = 1 + n % 8;
    const double eps = uniform_open(rng);
    const auto x = random_sequence(rng, 16);
    // y differs from x by less than 2^{-p} eps in every coordinate, or by a
    // random amount (premise then usually fails and the case is vacuous).
    const bool close = n % 2 == 0;
    std::vector<double> y(x.prefix().begin(), x.prefix().end());
    for (double& v : y) {
      const double step = close ? std::ldexp(eps, -static_cast<int>(p)) * uniform_open(rng)
                                : uniform_open(rng);
      v = uniform_open(rng) < 0.5 ? v + step : std::max(0.0, v - step);
    }
    const TruncatedSequence ys(std::move(y));
    if (d_inf(x, ys) < std::ldexp(eps, -static_cast<int>(p))) {
      const double d = d_p(proj(x, p), proj(ys, p));
      c.expect(d <= eps + 1e-12, [&] { return fmt("d_p=%.17g > eps=%.17g", d, eps); });
    }
  }
  return c.done();
}

inline CheckResult check_group_law(PhiloxEngine& rng) {
  Check c("scaling_group_law");
  const std::vector<ScalarAction> actions{ScalarAction::standard(),
                                          ScalarAction::power_weights({1.0, 2.0, 0.5}),
                                          ScalarAction::second_coord_only(),
                                          ScalarAction::radius_only()};
  for (int n = 0; n < 250; ++n)
    for (const auto& a : actions) {
      const auto x = random_vector(rng, 3);
      const double l1 = 0.1 + 10.0 * uniform_open(rng), l2 = 0.1 + 10.0 * uniform_open(rng);
      const auto lhs = apply_scaling(a, l1, apply_scaling(a, l2, x));
      const auto rhs = apply_scaling(a, l1 * l2, x);
      const auto one = apply_scaling(a, 1.0, x);
      c.expect(d_p(lhs, rhs) <= 1e-12 * (1.0 + d_p(rhs, FiniteVector{0, 0, 0})),
               [&] { return a.name() + ": lambda1 (lambda2 x) != (lambda1 lambda2) x"; });
      c.expect(one == x, [&] { return a.name() + ": 1 x != x"; });
    }
  return c.done();
}

inline CheckResult check_polar_roundtrips(PhiloxEngine& rng) {
  Check c("polar_roundtrip");
  for (int n = 0; n < 1000; ++n) {
    const std::size_t p = 2 + n % 4;
    const auto x = random_vector(rng, p);
    const auto pp = polar(x);
    double norm = 0.0;
    for (const double a : pp.angle.coords()) norm += a * a;
    c.expect(std::abs(std::sqrt(norm) - 1.0) <= 1e-9, [] { return std::string("|angle| != 1"); });
    c.expect(d_p(polar_inv(pp), x) <= 1e-9, [] { return std::string("polar_inv(polar(x)) != x"); });

    const std::vector<ConeSpec> cones{ConeSpec::origin(), ConeSpec::axes(p),
                                      ConeSpec::at_most_j_positive(1 + n % (p - 1))};
    for (const auto& cone : cones) {
      const auto gp = gpolar(x, cone);
      c.expect(std::abs(cone.distance(gp.angle) - 1.0) <= 1e-9,
               [&] { return cone.name() + ": gpolar angle clearance != 1"; });
      c.expect(d_p(gpolar_inv(gp, cone), x) <= 1e-9,
               [&] { return cone.name() + ": gpolar_inv(gpolar(x)) != x"; });
    }
    const auto z = random_vector(rng, 2);
    const auto gz = gpolar(z, ConeSpec::half_plane_floor());
    c.expect(d_p(gpolar_inv(gz, ConeSpec::half_plane_floor()), z) <= 1e-9,
             [] { return std::string("HalfPlaneFloor: gpolar roundtrip"); });
  }
  return c.done();
}

inline CheckResult check_t_m(PhiloxEngine& rng) {
  Check c("t_m_structure");
  for (int n = 0; n < 500; ++n) {
    const std::size_t m = 1 + n % 6;
    std::vector<double> sizes(m), times(m);
    for (double& s : sizes) s = uniform_open(rng) < 0.25 ? 0.0 : 4.0 * uniform_open(rng);
    std::sort(sizes.begin(), sizes.end(), std::greater<>());
    for (double& u : times) u = uniform_open(rng);
    const auto f = t_m(TruncatedSequence(sizes), times, m);
    const auto positive = static_cast<std::size_t>(
        std::count_if(sizes.begin(), sizes.end(), [](double s) { return s > 0.0; }));
    c.expect(f.jump_count() == positive, [] { return std::string("jump count"); });
    c.expect(std::abs(f.total_jump() -
                      std::accumulate(sizes.begin(), sizes.end(), 0.0)) <= 1e-12,
             [] { return std::string("total jump"); });
  }
  return c.done();
}

// Sets covering every oracle family and the orders the harness uses.
inline std::vector<std::pair<LimitMeasureId, TestSet>> homogeneity_cases(double alpha) {
  using K = LimitMeasureId::Kind;
  std::vector<std::pair<LimitMeasureId, TestSet>> v;
  v.push_back({{K::MuIid, 0, alpha}, TestSet::iid_rect("iid0", {1}, {1.7})});
  v.push_back({{K::MuIid, 1, alpha}, TestSet::iid_rect("iid1", {1, 2}, {2.0, 4.0})});
  v.push_back({{K::MuIid, 2, alpha}, TestSet::iid_rect("iid2", {1, 3, 4}, {0.5, 1.5, 3.0})});
  v.push_back({{K::MuIid, 1, alpha}, TestSet::iid_rect("iid1_m3", {1, 2, 3}, {1.0, 1.0, 2.0})});
  v.push_back({{K::MuIid, 0, alpha}, TestSet::sum_tail("sum3", 3, 2.0)});
  v.push_back({{K::MuPoissonOrdered, 1, alpha}, TestSet::ordered_rect("po1", {0.8})});
  v.push_back({{K::MuPoissonOrdered, 2, alpha}, TestSet::ordered_rect("po2", {2.0, 1.0})});
  v.push_back({{K::MuPoissonOrdered, 2, alpha}, TestSet::ordered_rect("po2s", {1.0, 2.0})});
  v.push_back({{K::MuPoissonOrdered, 3, alpha}, TestSet::ordered_rect("po3", {3.0, 1.0, 2.0})});
  v.push_back({{K::MuPoissonOrdered, 4, alpha}, TestSet::ordered_rect("po4", {4.0, 2.5, 2.5, 0.7})});
  v.push_back({{K::MuLevy, 1, alpha}, TestSet::jump_set("lv1", {1.3}, 0.4)});
  v.push_back({{K::MuLevy, 2, alpha}, TestSet::jump_set("lv2", {2.0, 1.0}, 0.1)});
  v.push_back({{K::MuLevy, 3, alpha}, TestSet::jump_set("lv3", {2.0, 1.5, 0.5}, 0.2)});
  return v;
}

inline CheckResult check_homogeneity(const OracleFn& oracle) {
  Check c("homogeneity_check");
  for (const double alpha : {0.5, 1.0, 2.0})
    for (const auto& [id, set] : homogeneity_cases(alpha))
      for (const double lambda : {0.5, 2.0, 10.0}) {
        const auto [lhs, rhs] = homogeneity_check(id, set, lambda, oracle);
        const double scale = std::max(std::abs(lhs), std::abs(rhs));
        c.expect(std::abs(lhs - rhs) <= 1e-10 * scale, [&] {
          std::ostringstream os;
          os.precision(17);
          os << id.name() << " j=" << id.j << " alpha=" << alpha << " set=" << set.id()
             << " lambda=" << lambda << ": " << lhs << " vs " << rhs;
          return os.str();
        });
      }
  return c.done();
}

inline CheckResult check_prohorov_exhaustive(PhiloxEngine& rng) {
  Check c("prohorov_vs_exhaustive");
  const ProhorovOptions opts{};
  for (int n = 0; n < 50; ++n) {
    auto random_measure = [&](std::size_t atoms) {
      std::vector<Atom> a;
      for (std::size_t i = 0; i < atoms; ++i)
        a.push_back({random_vector(rng, 2, 1.0), 0.05 + 0.6 * uniform_open(rng)});
      return PointMeasure(std::move(a));
    };
    const std::size_t total = 2 + n % 3;  // 2..4 atoms in all
    const std::size_t left = 1 + static_cast<std::size_t>(uniform_open(rng) * (total - 1));
    const auto mu = random_measure(left), nu = random_measure(total - left);
    const double fast = prohorov(mu, nu, GroundMetric::L1, opts);
    const double exact = reference::prohorov_exhaustive(mu, nu, GroundMetric::L1);
    c.expect(std::abs(fast - exact) <= 3.0 * opts.tol,
             [&] { return fmt("flow bisection %.17g vs exhaustive %.17g", fast, exact); });
  }
  return c.done();
}

inline CheckResult check_m0_monotone() {
  Check c("m0_monotone");
  const auto mu = PointMeasure::dirac(FiniteVector{1.0});
  double prev = std::numeric_limits<double>::infinity();
  for (const int n : {1, 2, 4, 8, 16}) {
    const auto mun = PointMeasure::dirac(FiniteVector{1.0 + 1.0 / n});
    const double v = m0_distance(mun, mu, ConeSpec::origin()).value;
    c.expect(v < prev, [&] { return fmt("m0 at n=%g is %.17g, not below the previous value", n, v); });
    prev = v;
  }
  return c.done();
}

inline CheckResult check_cone_distance(PhiloxEngine& rng) {
  Check c("dist_to_cone_exhaustive");
  for (int n = 0; n < 1000; ++n) {
    const auto x = random_sequence(rng, 12);
    const std::size_t j = static_cast<std::size_t>(n % 5);
    const double fast = ConeSpec::seq_at_most_j_positive(j).distance(x);
    const double exact = reference::seq_cone_distance_exhaustive(x, j);
    c.expect(fast == exact, [&] { return fmt("greedy %.17g vs exhaustive %.17g", fast, exact); });
    if (j >= 1) {
      const auto v = random_vector(rng, 1 + n % 7);
      const double vf = ConeSpec::at_most_j_positive(j).distance(v);
      const double ve = reference::vector_cone_distance_exhaustive(v, j);
      c.expect(std::abs(vf - ve) <= 1e-12,
               [&] { return fmt("R_+^p cone: %.17g vs %.17g", vf, ve); });
    }
  }
  return c.done();
}

}  // namespace detail

inline SelfcheckReport run_selfcheck(const SelfcheckOptions& options = {}) {
  const OracleFn oracle =
      options.oracle ? options.oracle
                     : OracleFn([](const LimitMeasureId& i, const TestSet& s) { return evaluate(i, s); });
  auto rng = derive_engine(options.seed, {0x5e1full});
  SelfcheckReport r;
  r.checks.push_back(detail::check_metric_axioms(rng));
  r.checks.push_back(detail::check_sandwich(rng));
  r.checks.push_back(detail::check_cumsum_lipschitz(rng));
  r.checks.push_back(detail::check_proj_continuity(rng));
  r.checks.push_back(detail::check_group_law(rng));
  r.checks.push_back(detail::check_polar_roundtrips(rng));
  r.checks.push_back(detail::check_t_m(rng));
  r.checks.push_back(detail::check_homogeneity(oracle));
  r.checks.push_back(detail::check_prohorov_exhaustive(rng));
  r.checks.push_back(detail::check_m0_monotone());
  r.checks.push_back(detail::check_cone_distance(rng));
  return r;
}

/// evaluate() with the tail index inflated by 1%: breaks homogeneity.
inline double corrupted_oracle(const LimitMeasureId& id, const TestSet& set) {
  LimitMeasureId bad = id;
  bad.alpha *= 1.01;
  return evaluate(bad, set);
}

}  // namespace hrv

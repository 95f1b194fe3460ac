#pragma once

// Continuous maps between the sample spaces: CUMSUM, PROJ_p, POLAR, GPOLAR
// and the jump-assembly map T_m.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "hrv/errors.hpp"
#include "hrv/points.hpp"
#include "hrv/scaling.hpp"
#include "hrv/spaces.hpp"

namespace hrv {

/// (x_1, x_1 + x_2, ...). The partial sums stay constant past the stored
/// prefix, so the result is filled out to the truncation depth. Lipschitz
/// with constant 2 under d_inf.
inline TruncatedSequence cumsum(const TruncatedSequence& x) {
  std::vector<double> out(x.prefix().begin(), x.prefix().end());
  for (std::size_t i = 1; i < out.size(); ++i) out[i] += out[i - 1];
  if (!out.empty() && out.back() > 0.0) out.resize(x.depth(), out.back());
  return TruncatedSequence(std::move(out), x.depth());
}

/// First p coordinates, zero padded past the stored prefix.
inline FiniteVector proj(const TruncatedSequence& x, std::size_t p) {
  if (p == 0) throw DomainError("proj: p must be >= 1");
  std::vector<double> out(p);
  for (std::size_t i = 0; i < p; ++i) out[i] = x[i];
  return FiniteVector(std::move(out));
}

struct PolarPair {
  double radius;
  FiniteVector angle;
};

/// (||x||_2, x / ||x||_2).
inline PolarPair polar(const FiniteVector& x) {
  double r2 = 0.0;
  for (const double c : x.coords()) r2 += c * c;
  const double r = std::sqrt(r2);
  if (!(r > 0.0)) throw DomainError("polar: zero vector has no angular part");
  std::vector<double> a(x.coords().begin(), x.coords().end());
  for (double& c : a) c /= r;
  return {r, FiniteVector(std::move(a))};
}

inline FiniteVector polar_inv(const PolarPair& pp) {
  if (!(pp.radius > 0.0)) throw DomainError("polar_inv: radius must be > 0");
  return apply_scaling(ScalarAction::standard(), pp.radius, pp.angle);
}

/// (d(x, C), x / d(x, C)). Only for cones whose ground metric is positively
/// homogeneous; the angle then sits at distance exactly 1 from the cone.
inline PolarPair gpolar(const FiniteVector& x, const ConeSpec& cone) {
  if (!cone.homogeneous_metric())
    throw UnsupportedError("gpolar: cone " + cone.name() +
                           " has a ground metric that is not positively homogeneous");
  const double r = cone.distance(x);
  if (!(r > 0.0)) throw DomainError("gpolar: point lies on the removed cone " + cone.name());
  std::vector<double> a(x.coords().begin(), x.coords().end());
  for (double& c : a) c /= r;
  return {r, FiniteVector(std::move(a))};
}

inline FiniteVector gpolar_inv(const PolarPair& pp, const ConeSpec& cone,
                               double angle_tol = 1e-9) {
  if (!cone.homogeneous_metric())
    throw UnsupportedError("gpolar_inv: cone " + cone.name() + " is not supported");
  if (!(pp.radius > 0.0)) throw DomainError("gpolar_inv: radius must be > 0");
  const double clearance = cone.distance(pp.angle);
  if (std::abs(clearance - 1.0) > angle_tol)
    throw DomainError("gpolar_inv: angle is not on the unit level set of d(., C)");
  return apply_scaling(ScalarAction::standard(), pp.radius, pp.angle);
}

/// T_m(x, u) = sum_{i<=m} x_i 1_{[u_i, 1]}: the i-th largest size placed at
/// time u_i. Zero sizes are dropped; the result is sorted by time.
inline StepFunction t_m(const TruncatedSequence& sizes, std::span<const double> times,
                        std::size_t m) {
  if (m == 0) throw DomainError("t_m: m must be >= 1");
  if (times.size() < m) throw DimensionError("t_m: fewer than m jump times supplied");
  for (std::size_t i = 0; i < m; ++i) {
    if (!(times[i] > 0.0 && times[i] < 1.0)) throw DomainError("t_m: times must lie in (0,1)");
    if (i > 0 && sizes[i] > sizes[i - 1]) throw DomainError("t_m: sizes must be nonincreasing");
  }
  std::vector<double> first(times.begin(), times.begin() + static_cast<std::ptrdiff_t>(m));
  std::sort(first.begin(), first.end());
  if (std::adjacent_find(first.begin(), first.end()) != first.end())
    throw DomainError("t_m: the first m jump times must be pairwise distinct");

  std::vector<Jump> jumps;
  jumps.reserve(m);
  for (std::size_t i = 0; i < m; ++i)
    if (sizes[i] > 0.0) jumps.push_back({times[i], sizes[i]});
  std::sort(jumps.begin(), jumps.end(), [](const Jump& a, const Jump& b) { return a.time < b.time; });
  return StepFunction(std::move(jumps));
}

/// (lambda, (r, a)) -> (lambda r, a) for RadiusOnly, Standard scales r too.
inline PolarPair apply_scaling(const ScalarAction& action, double lambda, const PolarPair& pp) {
  if (action.kind() != ScalarAction::Kind::RadiusOnly &&
      action.kind() != ScalarAction::Kind::Standard)
    throw TypeError("only RadiusOnly or Standard act on polar pairs");
  detail::check_lambda(lambda);
  return {pp.radius * lambda, pp.angle};
}

}  // namespace hrv

#pragma once

// Metrics on the sample spaces and distances to the removed cones.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "hrv/errors.hpp"
#include "hrv/points.hpp"
#include "hrv/scaling.hpp"

namespace hrv {

// ---------------------------------------------------------------------------
// Metrics

/// L1 metric on R_+^p.
inline double d_p(const FiniteVector& x, const FiniteVector& y) {
  if (x.size() != y.size())
    throw DimensionError("d_p: dimension mismatch (" + std::to_string(x.size()) + " vs " +
                         std::to_string(y.size()) + ")");
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += std::abs(x[i] - y[i]);
  return s;
}

inline double euclidean(const FiniteVector& x, const FiniteVector& y) {
  if (x.size() != y.size()) throw DimensionError("euclidean: dimension mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += (x[i] - y[i]) * (x[i] - y[i]);
  return std::sqrt(s);
}

/// sum_i (|x_i - y_i| ^ 1) 2^{-i}; exact, the implicit tails are zero.
inline double d_inf(const TruncatedSequence& x, const TruncatedSequence& y) {
  const std::size_t n = std::max(x.prefix_size(), y.prefix_size());
  double s = 0.0;
  double w = 0.5;
  for (std::size_t i = 0; i < n; ++i, w *= 0.5) s += std::min(std::abs(x[i] - y[i]), 1.0) * w;
  return s;
}

/// sum_p (||x_|p - y_|p||_1 ^ 1) 2^{-p}. Past the stored prefix (length L)
/// the partial L1 sums are constant, so the tail is (S_L ^ 1) 2^{-L}.
inline double d_inf_prime(const TruncatedSequence& x, const TruncatedSequence& y) {
  const std::size_t n = std::max(x.prefix_size(), y.prefix_size());
  double s = 0.0;
  double partial = 0.0;
  double w = 0.5;
  for (std::size_t i = 0; i < n; ++i, w *= 0.5) {
    partial += std::abs(x[i] - y[i]);
    s += std::min(partial, 1.0) * w;
  }
  // w == 2^{-(n+1)}, and sum_{p > n} 2^{-p} == 2^{-n} == 2w.
  return s + std::min(partial, 1.0) * 2.0 * w;
}

/// sup_{t in [0,1]} |x(t) - y(t)|.
inline double sup_distance(const StepFunction& x, const StepFunction& y) {
  double best = std::abs(x.base() - y.base());
  const auto xj = x.jumps();
  const auto yj = y.jumps();
  std::size_t i = 0, k = 0;
  double xv = x.base(), yv = y.base();
  while (i < xj.size() || k < yj.size()) {
    const double tx = i < xj.size() ? xj[i].time : 2.0;
    const double ty = k < yj.size() ? yj[k].time : 2.0;
    const double t = std::min(tx, ty);
    while (i < xj.size() && xj[i].time == t) xv += xj[i++].size;
    while (k < yj.size() && yj[k].time == t) yv += yj[k++].size;
    best = std::max(best, std::abs(xv - yv));
  }
  return best;
}

/// k-th largest jump size (k >= 1), 0 when there are fewer than k jumps.
inline double kth_largest_jump(const StepFunction& x, std::size_t k) {
  if (k == 0) throw DomainError("kth_largest_jump: k must be >= 1");
  if (x.jump_count() < k) return 0.0;
  std::vector<double> sizes;
  sizes.reserve(x.jump_count());
  for (const auto& j : x.jumps()) sizes.push_back(j.size);
  std::nth_element(sizes.begin(), sizes.begin() + static_cast<std::ptrdiff_t>(k - 1), sizes.end(),
                   std::greater<>());
  return sizes[k - 1];
}

// ---------------------------------------------------------------------------
// Skorohod distance between nondecreasing step functions

enum class SkorohodMode { UpperBound, BruteForce };

namespace detail {

// Cost of the piecewise-linear time change sending x's i-th jump to time v[i]:
// ||lambda - e|| = max_i |v_i - s_i| and ||x o lambda - y|| evaluated exactly.
inline double skorohod_candidate(const StepFunction& x, std::span<const double> v,
                                 const StepFunction& y) {
  const auto xj = x.jumps();
  double time_cost = 0.0;
  std::vector<Jump> moved(xj.size());
  for (std::size_t i = 0; i < xj.size(); ++i) {
    time_cost = std::max(time_cost, std::abs(v[i] - xj[i].time));
    moved[i] = {v[i], xj[i].size};
  }
  return std::max(time_cost, sup_distance(StepFunction(std::move(moved), x.base()), y));
}

inline bool valid_times(std::span<const double> v) {
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!(v[i] > 0.0 && v[i] < 1.0)) return false;
    if (i > 0 && !(v[i - 1] < v[i])) return false;
  }
  return true;
}

inline double skorohod_upper(const StepFunction& x, const StepFunction& y) {
  const auto xj = x.jumps();
  const auto yj = y.jumps();
  double best = sup_distance(x, y);  // identity time change
  const std::size_t k = std::min(xj.size(), yj.size());
  if (k == 0) return best;
  // Align the first k (then the last k) jumps in time order; unmatched jumps
  // of the longer list stay put, i.e. are matched with zero-size jumps.
  for (int variant = 0; variant < 2; ++variant) {
    std::vector<double> v(xj.size());
    for (std::size_t i = 0; i < xj.size(); ++i) v[i] = xj[i].time;
    for (std::size_t i = 0; i < k; ++i) {
      const std::size_t xi = variant == 0 ? i : xj.size() - k + i;
      const std::size_t yi = variant == 0 ? i : yj.size() - k + i;
      v[xi] = yj[yi].time;
    }
    if (valid_times(v)) best = std::min(best, skorohod_candidate(x, v, y));
  }
  return best;
}

// Every optimal time change can be pushed, without changing which jumps of x
// and y coincide or interleave, to one placing each jump either at its own
// time or within 3h of a jump time of y. Enumerating those placements bounds
// the error of the search by 3h.
inline double skorohod_brute(const StepFunction& x, const StepFunction& y) {
  constexpr double h = 2.5e-4;
  const auto xj = x.jumps();
  const auto yj = y.jumps();
  if (xj.empty()) return sup_distance(x, y);
  std::vector<std::vector<double>> cand(xj.size());
  for (std::size_t i = 0; i < xj.size(); ++i) {
    cand[i].push_back(xj[i].time);
    for (const auto& u : yj)
      for (int c = -3; c <= 3; ++c) {
        const double t = u.time + c * h;
        if (t > 0.0 && t < 1.0) cand[i].push_back(t);
      }
  }
  double best = std::numeric_limits<double>::infinity();
  std::vector<double> v(xj.size());
  std::function<void(std::size_t)> rec = [&](std::size_t i) {
    if (i == xj.size()) {
      best = std::min(best, skorohod_candidate(x, v, y));
      return;
    }
    for (const double t : cand[i]) {
      if (i > 0 && !(v[i - 1] < t)) continue;
      v[i] = t;
      rec(i + 1);
    }
  };
  rec(0);
  return best;
}

}  // namespace detail

/// Skorohod J1 distance between nondecreasing step functions.
/// UpperBound: piecewise-linear time changes aligning jumps in order (always
/// >= the true distance). BruteForce: search over jump-time reassignments,
/// accurate to 1e-3; at most three jumps per function.
inline double d_sk_step(const StepFunction& x, const StepFunction& y,
                        SkorohodMode mode = SkorohodMode::UpperBound) {
  if (mode == SkorohodMode::UpperBound) return detail::skorohod_upper(x, y);
  if (x.jump_count() > 3 || y.jump_count() > 3)
    throw UnsupportedError("d_sk_step BruteForce supports at most 3 jumps per function");
  return std::min(detail::skorohod_brute(x, y), detail::skorohod_upper(x, y));
}

// ---------------------------------------------------------------------------
// Removed cones

class ConeSpec {
 public:
  enum class Kind {
    Origin,              // {0} in any space
    Axes,                // R_+^p points with at most one positive coordinate (L1)
    AtMostJPositive,     // R_+^p points with at most j positive coordinates (L1)
    SeqAtMostJPositive,  // R_+^inf sequences with at most j positive terms (d_inf)
    StepAtMostJJumps,    // step functions with at most j jumps (Skorohod)
    HalfPlaneFloor       // R x {0} in the plane, scaled by (x1, lambda x2)
  };

  static ConeSpec origin() { return {Kind::Origin, 0}; }
  static ConeSpec axes(std::size_t p) {
    if (p == 0) throw DomainError("Axes: dimension must be >= 1");
    return {Kind::Axes, p};
  }
  static ConeSpec at_most_j_positive(std::size_t j) { return {Kind::AtMostJPositive, j}; }
  static ConeSpec seq_at_most_j_positive(std::size_t j) { return {Kind::SeqAtMostJPositive, j}; }
  static ConeSpec step_at_most_j_jumps(std::size_t j) { return {Kind::StepAtMostJJumps, j}; }
  static ConeSpec half_plane_floor() { return {Kind::HalfPlaneFloor, 0}; }

  Kind kind() const noexcept { return kind_; }
  /// p for Axes, j for the "at most j" families, unused otherwise.
  std::size_t param() const noexcept { return param_; }

  std::string name() const {
    switch (kind_) {
      case Kind::Origin: return "Origin";
      case Kind::Axes: return "Axes(" + std::to_string(param_) + ")";
      case Kind::AtMostJPositive: return "AtMostJPositive(" + std::to_string(param_) + ")";
      case Kind::SeqAtMostJPositive: return "SeqAtMostJPositive(" + std::to_string(param_) + ")";
      case Kind::StepAtMostJJumps: return "StepAtMostJJumps(" + std::to_string(param_) + ")";
      case Kind::HalfPlaneFloor: return "HalfPlaneFloor";
    }
    return "?";
  }

  ScalarAction action() const {
    return kind_ == Kind::HalfPlaneFloor ? ScalarAction::second_coord_only()
                                         : ScalarAction::standard();
  }

  Point scale(double lambda, const Point& x) const { return apply_scaling(action(), lambda, x); }

  /// d(theta x, theta y) = theta d(x, y) holds for the ground metric (finite
  /// dimensional cones under L1); false for d_inf and for D[0,1] cones here.
  bool homogeneous_metric() const noexcept {
    return kind_ == Kind::Origin || kind_ == Kind::Axes || kind_ == Kind::AtMostJPositive ||
           kind_ == Kind::HalfPlaneFloor;
  }

  double distance(const FiniteVector& x) const {
    switch (kind_) {
      case Kind::Origin: {
        double s = 0.0;
        for (const double c : x.coords()) s += c;
        return s;
      }
      case Kind::Axes:
        if (x.size() != param_)
          throw DimensionError("Axes(" + std::to_string(param_) + "): vector has dimension " +
                               std::to_string(x.size()));
        return sum_all_but_largest(x.coords(), 1);
      case Kind::AtMostJPositive:
        return sum_all_but_largest(x.coords(), param_);
      case Kind::HalfPlaneFloor:
        if (x.size() != 2) throw DimensionError("HalfPlaneFloor: needs a planar point");
        return x[1];
      default:
        throw TypeError("cone " + name() + " does not live in R_+^p");
    }
  }

  double distance(const TruncatedSequence& x) const {
    switch (kind_) {
      case Kind::Origin:
        return d_inf(x, TruncatedSequence{});
      case Kind::SeqAtMostJPositive: {
        // Terms (x_i ^ 1) 2^{-i} are independent; dropping the j largest is optimal.
        const std::size_t n = x.prefix_size();
        std::vector<double> terms(n);
        double w = 0.5;
        for (std::size_t i = 0; i < n; ++i, w *= 0.5) terms[i] = std::min(x[i], 1.0) * w;
        std::vector<std::size_t> order(n);
        for (std::size_t i = 0; i < n; ++i) order[i] = i;
        const std::size_t keep = std::min(param_, n);
        std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(keep),
                          order.end(), [&](std::size_t a, std::size_t b) {
                            return terms[a] > terms[b] || (terms[a] == terms[b] && a < b);
                          });
        std::vector<bool> dropped(n, false);
        for (std::size_t k = 0; k < keep; ++k) dropped[order[k]] = true;
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i)
          if (!dropped[i]) total += terms[i];
        return total;
      }
      default:
        throw TypeError("cone " + name() + " does not live in R_+^inf");
    }
  }

  double distance(const StepFunction& x) const {
    switch (kind_) {
      case Kind::Origin:
        return std::max(std::abs(x.base()), std::abs(x.base() + x.total_jump()));
      case Kind::StepAtMostJJumps:
        throw UnsupportedError(
            "distance to StepAtMostJJumps is not computed; use kth_largest_jump with a "
            "time-separation constraint as the clearance functional");
      default:
        throw TypeError("cone " + name() + " does not live in D[0,1]");
    }
  }

  double distance(const Point& x) const {
    return std::visit([&](const auto& p) { return distance(p); }, x);
  }

 private:
  ConeSpec(Kind k, std::size_t param) : kind_(k), param_(param) {}

  static double sum_all_but_largest(std::span<const double> v, std::size_t keep) {
    if (v.size() <= keep) return 0.0;
    std::vector<double> s(v.begin(), v.end());
    std::nth_element(s.begin(), s.begin() + static_cast<std::ptrdiff_t>(keep), s.end(),
                     std::greater<>());
    double total = 0.0;
    for (std::size_t i = keep; i < s.size(); ++i) total += s[i];
    return total;
  }

  Kind kind_;
  std::size_t param_;
};

inline double dist_to_cone(const Point& x, const ConeSpec& cone) { return cone.distance(x); }

// ---------------------------------------------------------------------------
// Ground metric selector used by the measure-level metrics

enum class GroundMetric { L1, Euclidean, DInf, DInfPrime, Skorohod };

inline const char* ground_name(GroundMetric g) {
  switch (g) {
    case GroundMetric::L1: return "l1";
    case GroundMetric::Euclidean: return "euclidean";
    case GroundMetric::DInf: return "d_inf";
    case GroundMetric::DInfPrime: return "d_inf_prime";
    case GroundMetric::Skorohod: return "skorohod";
  }
  return "?";
}

inline double ground_distance(const Point& a, const Point& b, GroundMetric g) {
  if (a.index() != b.index())
    throw TypeError(std::string("ground_distance: mixed spaces (") + space_name(a) + ", " +
                    space_name(b) + ")");
  switch (g) {
    case GroundMetric::L1:
    case GroundMetric::Euclidean:
      if (const auto* x = std::get_if<FiniteVector>(&a)) {
        const auto& y = std::get<FiniteVector>(b);
        return g == GroundMetric::L1 ? d_p(*x, y) : euclidean(*x, y);
      }
      break;
    case GroundMetric::DInf:
    case GroundMetric::DInfPrime:
      if (const auto* x = std::get_if<TruncatedSequence>(&a)) {
        const auto& y = std::get<TruncatedSequence>(b);
        return g == GroundMetric::DInf ? d_inf(*x, y) : d_inf_prime(*x, y);
      }
      break;
    case GroundMetric::Skorohod:
      if (const auto* x = std::get_if<StepFunction>(&a))
        return d_sk_step(*x, std::get<StepFunction>(b), SkorohodMode::UpperBound);
      break;
  }
  throw TypeError(std::string("ground metric ") + ground_name(g) + " is not defined on " +
                  space_name(a));
}

}  // namespace hrv

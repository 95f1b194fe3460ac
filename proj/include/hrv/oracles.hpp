#pragma once

// Closed-form limit measures on threshold test sets.
//
// MuIid(j) is the order-j hidden limit of an iid Pareto sequence (scaling
// b(t^{1/(j+1)})), MuPoissonOrdered(j) the limit for the first j ordered
// Poisson points and MuLevy(j) its image on step functions with j jumps (both
// scaling b(t^{1/j})).

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <numbers>
#include <span>
#include <string>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

#include "hrv/errors.hpp"
#include "hrv/points.hpp"

namespace hrv {

// ---------------------------------------------------------------------------
// Test sets

/// {x : x_{i_k} > a_k, k = 1..m}; indices are 1-based and strictly increasing.
struct IidRect {
  std::vector<std::size_t> indices;
  std::vector<double> thresholds;
};

/// {z : z_k > a_k, k = 1..j} on nonincreasing sequences.
struct OrderedRect {
  std::vector<double> thresholds;
};

/// {x : x_1 + ... + x_p > x}.
struct SumTail {
  std::size_t p = 1;
  double x = 1.0;
};

/// Step functions whose k-th largest jump exceeds a_k (k <= j) and whose j
/// largest jumps are pairwise at least rho apart in time.
struct JumpSet {
  std::vector<double> thresholds;
  double rho = 0.0;
};

class TestSet {
 public:
  using Family = std::variant<IidRect, OrderedRect, SumTail, JumpSet>;

  TestSet(std::string id, Family family) : id_(std::move(id)), family_(std::move(family)) {
    validate();
  }

  static TestSet iid_rect(std::string id, std::vector<std::size_t> indices,
                          std::vector<double> thresholds) {
    return TestSet(std::move(id), IidRect{std::move(indices), std::move(thresholds)});
  }
  static TestSet ordered_rect(std::string id, std::vector<double> thresholds) {
    return TestSet(std::move(id), OrderedRect{std::move(thresholds)});
  }
  static TestSet sum_tail(std::string id, std::size_t p, double x) {
    return TestSet(std::move(id), SumTail{p, x});
  }
  static TestSet jump_set(std::string id, std::vector<double> thresholds, double rho) {
    return TestSet(std::move(id), JumpSet{std::move(thresholds), rho});
  }

  const std::string& id() const noexcept { return id_; }
  const Family& family() const noexcept { return family_; }
  std::string family_name() const {
    static constexpr std::array<const char*, 4> names{"IidRect", "OrderedRect", "SumTail",
                                                      "JumpSet"};
    return names[family_.index()];
  }

  /// Smallest threshold: the set stays inside {thresholds > 0} after lowering
  /// every threshold by less than this.
  double clearance() const {
    return std::visit(
        [](const auto& f) -> double {
          using F = std::decay_t<decltype(f)>;
          if constexpr (std::is_same_v<F, SumTail>) {
            return f.x;
          } else {
            return *std::min_element(f.thresholds.begin(), f.thresholds.end());
          }
        },
        family_);
  }

  /// Number of thresholds (the sum tail counts as one).
  std::size_t order() const {
    return std::visit(
        [](const auto& f) -> std::size_t {
          using F = std::decay_t<decltype(f)>;
          if constexpr (std::is_same_v<F, SumTail>) {
            return 1;
          } else {
            return f.thresholds.size();
          }
        },
        family_);
  }

  /// lambda * A: every threshold multiplied by lambda.
  TestSet scaled(double lambda) const {
    if (!(lambda > 0.0) || !std::isfinite(lambda))
      throw DomainError("TestSet::scaled: lambda must be finite and > 0");
    return map_thresholds([lambda](double a) { return a * lambda; });
  }

  /// Every threshold moved by delta; delta > 0 shrinks the set.
  TestSet shifted(double delta) const {
    if (!std::isfinite(delta)) throw DomainError("TestSet::shifted: delta must be finite");
    if (delta <= -clearance())
      throw DomainError("TestSet::shifted: thresholds would leave (0, inf)");
    return map_thresholds([delta](double a) { return a + delta; });
  }

  /// x / scale in A, for a flat sample (iid coordinates or ordered points).
  bool contains(std::span<const double> x, double scale = 1.0) const {
    return std::visit(
        [&](const auto& f) -> bool {
          using F = std::decay_t<decltype(f)>;
          if constexpr (std::is_same_v<F, IidRect>) {
            if (f.indices.back() > x.size())
              throw DimensionError("IidRect index exceeds sample dimension");
            for (std::size_t k = 0; k < f.indices.size(); ++k)
              if (!(x[f.indices[k] - 1] > scale * f.thresholds[k])) return false;
            return true;
          } else if constexpr (std::is_same_v<F, OrderedRect>) {
            if (f.thresholds.size() > x.size())
              throw DimensionError("OrderedRect order exceeds sample length");
            for (std::size_t k = 0; k < f.thresholds.size(); ++k)
              if (!(x[k] > scale * f.thresholds[k])) return false;
            return true;
          } else if constexpr (std::is_same_v<F, SumTail>) {
            if (f.p > x.size()) throw DimensionError("SumTail p exceeds sample dimension");
            double s = 0.0;
            for (std::size_t i = 0; i < f.p; ++i) s += x[i];
            return s > scale * f.x;
          } else {
            throw TypeError("JumpSet membership needs a step function");
          }
        },
        family_);
  }

  bool contains(const StepFunction& x, double scale = 1.0) const {
    const auto* js = std::get_if<JumpSet>(&family_);
    if (js == nullptr) throw TypeError(family_name() + " membership needs a flat sample");
    const std::size_t j = js->thresholds.size();
    const auto jumps = x.jumps();
    if (jumps.size() < j) return false;
    std::vector<Jump> top(jumps.begin(), jumps.end());
    std::partial_sort(top.begin(), top.begin() + static_cast<std::ptrdiff_t>(j), top.end(),
                      [](const Jump& a, const Jump& b) { return a.size > b.size; });
    for (std::size_t k = 0; k < j; ++k)
      if (!(top[k].size > scale * js->thresholds[k])) return false;
    if (j >= 2 && js->rho > 0.0) {
      std::vector<double> times(j);
      for (std::size_t k = 0; k < j; ++k) times[k] = top[k].time;
      std::sort(times.begin(), times.end());
      for (std::size_t k = 1; k < j; ++k)
        if (times[k] - times[k - 1] < js->rho) return false;
    }
    return true;
  }

 private:
  template <class Fn>
  TestSet map_thresholds(Fn fn) const {
    Family f = family_;
    std::visit(
        [&](auto& g) {
          using F = std::decay_t<decltype(g)>;
          if constexpr (std::is_same_v<F, SumTail>) {
            g.x = fn(g.x);
          } else {
            for (double& a : g.thresholds) a = fn(a);
          }
        },
        f);
    return TestSet(id_, std::move(f));
  }

  void validate() const {
    auto check_thresholds = [this](const std::vector<double>& a) {
      if (a.empty()) throw DomainError("test set " + id_ + ": no thresholds");
      for (const double v : a)
        if (!(v > 0.0) || !std::isfinite(v))
          throw DomainError("test set " + id_ + ": thresholds must be finite and > 0");
    };
    std::visit(
        [&](const auto& f) {
          using F = std::decay_t<decltype(f)>;
          if constexpr (std::is_same_v<F, IidRect>) {
            check_thresholds(f.thresholds);
            if (f.indices.size() != f.thresholds.size())
              throw DimensionError("test set " + id_ + ": indices and thresholds differ in length");
            for (std::size_t k = 0; k < f.indices.size(); ++k) {
              if (f.indices[k] == 0) throw DomainError("test set " + id_ + ": indices are 1-based");
              if (k > 0 && f.indices[k] <= f.indices[k - 1])
                throw DomainError("test set " + id_ + ": indices must be strictly increasing");
            }
          } else if constexpr (std::is_same_v<F, OrderedRect>) {
            check_thresholds(f.thresholds);
          } else if constexpr (std::is_same_v<F, SumTail>) {
            if (f.p == 0) throw DomainError("test set " + id_ + ": p must be >= 1");
            if (!(f.x > 0.0) || !std::isfinite(f.x))
              throw DomainError("test set " + id_ + ": x must be finite and > 0");
          } else {
            check_thresholds(f.thresholds);
            for (std::size_t k = 1; k < f.thresholds.size(); ++k)
              if (f.thresholds[k] > f.thresholds[k - 1])
                throw DomainError("test set " + id_ + ": jump thresholds must be nonincreasing");
            const double j = static_cast<double>(f.thresholds.size());
            if (!(f.rho >= 0.0) || !(f.rho < 1.0 / std::max(1.0, j - 1.0)))
              throw DomainError("test set " + id_ + ": rho must lie in [0, 1/max(1, j-1))");
          }
        },
        family_);
  }

  std::string id_;
  Family family_;
};

// ---------------------------------------------------------------------------
// Limit measures

struct LimitMeasureId {
  enum class Kind { MuIid, MuPoissonOrdered, MuLevy };
  Kind kind = Kind::MuIid;
  std::size_t j = 0;
  double alpha = 1.0;

  /// Number of nu_alpha factors: j+1 for MuIid, j otherwise.
  std::size_t product_order() const { return kind == Kind::MuIid ? j + 1 : j; }

  std::string name() const {
    switch (kind) {
      case Kind::MuIid: return "MuIid";
      case Kind::MuPoissonOrdered: return "MuPoissonOrdered";
      case Kind::MuLevy: return "MuLevy";
    }
    return "?";
  }
};

namespace detail {
inline void check_alpha(double alpha) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw DomainError("alpha must be finite and > 0");
}
}  // namespace detail

/// nu_alpha(x, inf) = x^{-alpha}.
inline double nu_alpha_tail(double alpha, double x) {
  detail::check_alpha(alpha);
  if (!(x > 0.0)) throw DomainError("nu_alpha_tail: x must be > 0");
  return std::pow(x, -alpha);
}

inline double mu_iid_rect(std::size_t j, double alpha, const IidRect& set) {
  detail::check_alpha(alpha);
  const std::size_t m = set.thresholds.size();
  if (m < j + 1)
    throw DomainError("mu_iid_rect: a rectangle with " + std::to_string(m) +
                      " constraints is not bounded away from the removed cone at order " +
                      std::to_string(j));
  if (m > j + 1) return 0.0;
  double v = 1.0;
  for (const double a : set.thresholds) v *= nu_alpha_tail(alpha, a);
  return v;
}

inline double mu_sum_tail(std::size_t p, double alpha, double x) {
  if (p == 0) throw DomainError("mu_sum_tail: p must be >= 1");
  return static_cast<double>(p) * nu_alpha_tail(alpha, x);
}

namespace detail {

// Gauss-Legendre nodes and weights on [-1, 1] by Newton iteration.
inline std::pair<std::vector<double>, std::vector<double>> gauss_legendre(std::size_t n) {
  std::vector<double> x(n), w(n);
  for (std::size_t i = 0; i < n; ++i) {
    double z = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) / (static_cast<double>(n) + 0.5));
    double dp = 1.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = z;
      for (std::size_t k = 2; k <= n; ++k) {
        const double p2 =
            ((2.0 * static_cast<double>(k) - 1.0) * z * p1 - (static_cast<double>(k) - 1.0) * p0) /
            static_cast<double>(k);
        p0 = p1;
        p1 = p2;
      }
      dp = static_cast<double>(n) * (z * p1 - p0) / (z * z - 1.0);
      const double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    x[i] = z;
    w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
  }
  return {x, w};
}

// Volume of {0 <= w_1 <= ... <= w_k <= s, w_i <= c_i}, c nondecreasing.
// Each piece between consecutive breakpoints is a polynomial of degree < k,
// so Gauss-Legendre with the given node count is exact up to rounding.
inline double ordered_volume(std::span<const double> c, std::size_t k, double s,
                             const std::vector<double>& nodes, const std::vector<double>& weights) {
  const double upper = std::min(s, c[k - 1]);
  if (upper <= 0.0) return 0.0;
  if (k == 1) return upper;
  std::vector<double> cuts{0.0};
  for (std::size_t i = 0; i + 1 < k; ++i)
    if (c[i] > cuts.back() && c[i] < upper) cuts.push_back(c[i]);
  cuts.push_back(upper);
  double total = 0.0;
  for (std::size_t piece = 0; piece + 1 < cuts.size(); ++piece) {
    const double lo = cuts[piece], hi = cuts[piece + 1];
    const double half = 0.5 * (hi - lo), mid = 0.5 * (hi + lo);
    for (std::size_t q = 0; q < nodes.size(); ++q)
      total += weights[q] * half * ordered_volume(c, k - 1, mid + half * nodes[q], nodes, weights);
  }
  return total;
}

// Substituting w = z^{-alpha} maps the ordered region to nondecreasing w with
// w_k < (max_{i >= k} a_i)^{-alpha}.
inline std::vector<double> ordered_caps(double alpha, std::span<const double> a) {
  std::vector<double> c(a.size());
  double run = 0.0;
  for (std::size_t k = a.size(); k-- > 0;) {
    run = std::max(run, a[k]);
    c[k] = std::pow(run, -alpha);
  }
  return c;
}

}  // namespace detail

/// Recursive Gauss-Legendre evaluation valid for every j >= 1.
inline double mu_poisson_ordered_quadrature(std::size_t j, double alpha, const OrderedRect& set) {
  detail::check_alpha(alpha);
  if (j == 0) throw DomainError("mu_poisson_ordered: j must be >= 1");
  if (set.thresholds.size() != j)
    throw DimensionError("mu_poisson_ordered: expected " + std::to_string(j) + " thresholds");
  for (const double a : set.thresholds)
    if (!(a > 0.0)) throw DomainError("mu_poisson_ordered: thresholds must be > 0");
  const auto c = detail::ordered_caps(alpha, set.thresholds);
  const auto [nodes, weights] = detail::gauss_legendre(j / 2 + 2);
  return detail::ordered_volume(c, j, c[j - 1], nodes, weights);
}

inline double mu_poisson_ordered(std::size_t j, double alpha, const OrderedRect& set) {
  detail::check_alpha(alpha);
  if (j == 0) throw DomainError("mu_poisson_ordered: j must be >= 1");
  if (set.thresholds.size() != j)
    throw DimensionError("mu_poisson_ordered: expected " + std::to_string(j) + " thresholds");
  for (const double a : set.thresholds)
    if (!(a > 0.0)) throw DomainError("mu_poisson_ordered: thresholds must be > 0");
  const auto& a = set.thresholds;
  if (j == 1) return std::pow(a[0], -alpha);
  if (j == 2) {
    if (a[0] > a[1]) return std::pow(a[0], -alpha) * std::pow(a[1], -alpha) - std::pow(a[0], -2.0 * alpha) / 2.0;
    return std::pow(a[1], -2.0 * alpha) / 2.0;
  }
  return mu_poisson_ordered_quadrature(j, alpha, set);
}

/// Size factor mu_poisson_ordered times the probability that the sorted
/// times of j iid uniforms have all gaps >= rho, (1 - (j-1) rho)^j.
inline double mu_levy_jumpset(std::size_t j, double alpha, const JumpSet& set) {
  if (j == 0) throw DomainError("mu_levy_jumpset: j must be >= 1");
  const double jd = static_cast<double>(j);
  if (!(set.rho >= 0.0) || !(set.rho < 1.0 / std::max(1.0, jd - 1.0)))
    throw DomainError("mu_levy_jumpset: rho must lie in [0, 1/max(1, j-1))");
  const double size = mu_poisson_ordered(j, alpha, OrderedRect{set.thresholds});
  if (j == 1) return size;
  return size * std::pow(1.0 - (jd - 1.0) * set.rho, jd);
}

/// mu(set) for the pairing (MuIid, IidRect | SumTail), (MuPoissonOrdered,
/// OrderedRect), (MuLevy, JumpSet).
inline double evaluate(const LimitMeasureId& id, const TestSet& set) {
  using K = LimitMeasureId::Kind;
  const auto& f = set.family();
  switch (id.kind) {
    case K::MuIid:
      if (const auto* r = std::get_if<IidRect>(&f)) return mu_iid_rect(id.j, id.alpha, *r);
      if (const auto* s = std::get_if<SumTail>(&f)) {
        if (id.j != 0)
          throw UnsupportedError("no sum-tail limit exists for hidden order j >= 1");
        return mu_sum_tail(s->p, id.alpha, s->x);
      }
      break;
    case K::MuPoissonOrdered:
      if (const auto* r = std::get_if<OrderedRect>(&f)) return mu_poisson_ordered(id.j, id.alpha, *r);
      break;
    case K::MuLevy:
      if (const auto* r = std::get_if<JumpSet>(&f)) {
        if (r->thresholds.size() != id.j)
          throw DimensionError("mu_levy_jumpset: expected " + std::to_string(id.j) + " thresholds");
        return mu_levy_jumpset(id.j, id.alpha, *r);
      }
      break;
  }
  throw TypeError(id.name() + " is not defined on " + set.family_name() + " sets");
}

using OracleFn = std::function<double(const LimitMeasureId&, const TestSet&)>;

/// (mu(lambda A), lambda^{-m alpha} mu(A)) with m the product order.
inline std::pair<double, double> homogeneity_check(const LimitMeasureId& id, const TestSet& set,
                                                   double lambda, const OracleFn& oracle) {
  const double lhs = oracle(id, set.scaled(lambda));
  const double m = static_cast<double>(id.product_order());
  return {lhs, std::pow(lambda, -m * id.alpha) * oracle(id, set)};
}

inline std::pair<double, double> homogeneity_check(const LimitMeasureId& id, const TestSet& set,
                                                   double lambda) {
  return homogeneity_check(id, set, lambda,
                           [](const LimitMeasureId& i, const TestSet& s) { return evaluate(i, s); });
}

}  // namespace hrv

#pragma once

// Elements of the three sample spaces: R_+^p, truncated R_+^inf, and
// nondecreasing step functions on [0,1].

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "hrv/errors.hpp"

namespace hrv {

inline constexpr std::size_t kDefaultTruncationDepth = 64;

/// A point of R_+^p.
class FiniteVector {
 public:
  FiniteVector() = default;  // empty only as a moved-from / placeholder state
  explicit FiniteVector(std::vector<double> coords) : coords_(std::move(coords)) {
    if (coords_.empty()) throw DimensionError("FiniteVector: dimension must be >= 1");
    for (const double c : coords_) {
      if (!(c >= 0.0) || !std::isfinite(c))
        throw DomainError("FiniteVector: coordinates must be finite and >= 0");
    }
  }
  FiniteVector(std::initializer_list<double> coords)
      : FiniteVector(std::vector<double>(coords)) {}

  std::size_t size() const noexcept { return coords_.size(); }
  double operator[](std::size_t i) const { return coords_[i]; }
  std::span<const double> coords() const noexcept { return coords_; }

  friend bool operator==(const FiniteVector&, const FiniteVector&) = default;

 private:
  std::vector<double> coords_;
};

/// A point of R_+^inf stored as a prefix; coordinates past the prefix are 0.
/// Indices are 0-based in code; the metric weights use 1-based 2^{-i}.
class TruncatedSequence {
 public:
  TruncatedSequence() = default;
  explicit TruncatedSequence(std::vector<double> prefix,
                             std::size_t depth = kDefaultTruncationDepth)
      : coords_(std::move(prefix)), depth_(depth) {
    if (depth_ == 0) throw DomainError("TruncatedSequence: depth must be >= 1");
    if (coords_.size() > depth_)
      throw DimensionError("TruncatedSequence: prefix longer than truncation depth");
    for (const double c : coords_) {
      if (!(c >= 0.0) || !std::isfinite(c))
        throw DomainError("TruncatedSequence: coordinates must be finite and >= 0");
    }
  }
  TruncatedSequence(std::initializer_list<double> prefix)
      : TruncatedSequence(std::vector<double>(prefix)) {}

  /// Stored prefix length (<= depth).
  std::size_t prefix_size() const noexcept { return coords_.size(); }
  std::size_t depth() const noexcept { return depth_; }
  double operator[](std::size_t i) const noexcept {
    return i < coords_.size() ? coords_[i] : 0.0;
  }
  std::span<const double> prefix() const noexcept { return coords_; }

  friend bool operator==(const TruncatedSequence& a, const TruncatedSequence& b) {
    const std::size_t n = std::max(a.prefix_size(), b.prefix_size());
    for (std::size_t i = 0; i < n; ++i)
      if (a[i] != b[i]) return false;
    return true;
  }

 private:
  std::vector<double> coords_;
  std::size_t depth_ = kDefaultTruncationDepth;
};

struct Jump {
  double time;
  double size;
  friend bool operator==(const Jump&, const Jump&) = default;
};

/// x(t) = base + sum_i size_i * 1[time_i <= t] on [0,1], sizes > 0.
class StepFunction {
 public:
  StepFunction() = default;
  explicit StepFunction(std::vector<Jump> jumps, double base = 0.0)
      : jumps_(std::move(jumps)), base_(base) {
    if (!std::isfinite(base_)) throw DomainError("StepFunction: base must be finite");
    for (std::size_t i = 0; i < jumps_.size(); ++i) {
      const auto& j = jumps_[i];
      if (!(j.time > 0.0 && j.time < 1.0))
        throw DomainError("StepFunction: jump times must lie in (0,1)");
      if (!(j.size > 0.0) || !std::isfinite(j.size))
        throw DomainError("StepFunction: jump sizes must be finite and > 0");
      if (i > 0 && !(jumps_[i - 1].time < j.time))
        throw DomainError("StepFunction: jump times must be strictly increasing");
    }
  }

  std::span<const Jump> jumps() const noexcept { return jumps_; }
  std::size_t jump_count() const noexcept { return jumps_.size(); }
  double base() const noexcept { return base_; }

  double operator()(double t) const noexcept {
    double v = base_;
    for (const auto& j : jumps_) {
      if (j.time > t) break;
      v += j.size;
    }
    return v;
  }

  double total_jump() const noexcept {
    double s = 0.0;
    for (const auto& j : jumps_) s += j.size;
    return s;
  }

  friend bool operator==(const StepFunction&, const StepFunction&) = default;

 private:
  std::vector<Jump> jumps_;
  double base_ = 0.0;
};

using Point = std::variant<FiniteVector, TruncatedSequence, StepFunction>;

inline const char* space_name(const Point& p) {
  switch (p.index()) {
    case 0: return "R_+^p vector";
    case 1: return "R_+^inf sequence";
    default: return "step function";
  }
}

}  // namespace hrv

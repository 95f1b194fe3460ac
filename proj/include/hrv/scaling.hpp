#pragma once

// Scalar actions (lambda, x) -> lambda x. Each satisfies 1x = x and
// lambda1 (lambda2 x) = (lambda1 lambda2) x.

#include <cmath>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "hrv/errors.hpp"
#include "hrv/points.hpp"

namespace hrv {

class ScalarAction {
 public:
  enum class Kind { Standard, PowerWeights, SecondCoordOnly, RadiusOnly };

  static ScalarAction standard() { return ScalarAction(Kind::Standard, {}); }
  /// (lambda, x) -> (lambda^{1/g_1} x_1, ..., lambda^{1/g_p} x_p).
  static ScalarAction power_weights(std::vector<double> gammas) {
    if (gammas.empty()) throw DomainError("PowerWeights: need at least one gamma");
    for (const double g : gammas)
      if (!(g > 0.0) || !std::isfinite(g)) throw DomainError("PowerWeights: gammas must be > 0");
    return ScalarAction(Kind::PowerWeights, std::move(gammas));
  }
  /// (lambda, (x_1, x_2)) -> (x_1, lambda x_2).
  static ScalarAction second_coord_only() { return ScalarAction(Kind::SecondCoordOnly, {}); }
  /// (lambda, (r, a)) -> (lambda r, a); on a flat vector the radius is coordinate 0.
  static ScalarAction radius_only() { return ScalarAction(Kind::RadiusOnly, {}); }

  Kind kind() const noexcept { return kind_; }
  const std::vector<double>& gammas() const noexcept { return gammas_; }

  std::string name() const {
    switch (kind_) {
      case Kind::Standard: return "Standard";
      case Kind::PowerWeights: return "PowerWeights";
      case Kind::SecondCoordOnly: return "SecondCoordOnly";
      case Kind::RadiusOnly: return "RadiusOnly";
    }
    return "?";
  }

 private:
  ScalarAction(Kind k, std::vector<double> g) : kind_(k), gammas_(std::move(g)) {}
  Kind kind_;
  std::vector<double> gammas_;
};

namespace detail {
inline void check_lambda(double lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda))
    throw DomainError("scalar action: lambda must be finite and > 0");
}
}  // namespace detail

inline FiniteVector apply_scaling(const ScalarAction& action, double lambda,
                                  const FiniteVector& x) {
  detail::check_lambda(lambda);
  std::vector<double> out(x.coords().begin(), x.coords().end());
  switch (action.kind()) {
    case ScalarAction::Kind::Standard:
      for (double& c : out) c *= lambda;
      break;
    case ScalarAction::Kind::PowerWeights: {
      const auto& g = action.gammas();
      if (g.size() != out.size())
        throw DimensionError("PowerWeights: gamma count does not match vector dimension");
      for (std::size_t i = 0; i < out.size(); ++i) out[i] *= std::pow(lambda, 1.0 / g[i]);
      break;
    }
    case ScalarAction::Kind::SecondCoordOnly:
      if (out.size() < 2) throw DimensionError("SecondCoordOnly: needs dimension >= 2");
      out[1] *= lambda;
      break;
    case ScalarAction::Kind::RadiusOnly:
      out[0] *= lambda;
      break;
  }
  return FiniteVector(std::move(out));
}

inline TruncatedSequence apply_scaling(const ScalarAction& action, double lambda,
                                       const TruncatedSequence& x) {
  detail::check_lambda(lambda);
  if (action.kind() != ScalarAction::Kind::Standard)
    throw TypeError("only the Standard action is defined on R_+^inf");
  std::vector<double> out(x.prefix().begin(), x.prefix().end());
  for (double& c : out) c *= lambda;
  return TruncatedSequence(std::move(out), x.depth());
}

/// Standard action on step functions: sizes and base scale, times do not.
inline StepFunction apply_scaling(const ScalarAction& action, double lambda,
                                  const StepFunction& x) {
  detail::check_lambda(lambda);
  if (action.kind() != ScalarAction::Kind::Standard)
    throw TypeError("only the Standard action is defined on step functions");
  std::vector<Jump> jumps(x.jumps().begin(), x.jumps().end());
  for (auto& j : jumps) j.size *= lambda;
  return StepFunction(std::move(jumps), x.base() * lambda);
}

inline Point apply_scaling(const ScalarAction& action, double lambda, const Point& x) {
  return std::visit([&](const auto& p) -> Point { return apply_scaling(action, lambda, p); }, x);
}

}  // namespace hrv

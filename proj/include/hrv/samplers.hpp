#pragma once

// Random generation: Pareto variables, iid heavy-tailed vectors, ordered
// Poisson points Q^{<-}(Gamma_l), compound Poisson jump paths and Levy paths.
//
// The canonical Levy measure is nu(dx) = alpha x^{-alpha-1} dx on (0, inf), so
// Q^{<-}(y) = y^{-1/alpha} and b(t) = t^{1/alpha} exactly. All samplers take
// the generator by reference and are otherwise stateless.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "hrv/errors.hpp"
#include "hrv/points.hpp"
#include "hrv/rng.hpp"
#include "hrv/transforms.hpp"

namespace hrv {

enum class TailForm {
  ParetoVariable,        // P[X > x] = x^{-alpha}, x >= 1
  CanonicalLevyMeasure,  // nu(x, inf) = x^{-alpha}, x > 0
};

struct TailModel {
  double alpha = 1.0;
  TailForm form = TailForm::ParetoVariable;

  void validate() const {
    if (!(alpha > 0.0) || !std::isfinite(alpha))
      throw ConfigError("tail index alpha must be finite and > 0");
  }
};

/// b(t^{1/root}) with b(t) = t^{1/alpha} for both canonical forms.
struct ScalingFunction {
  TailModel model;
  unsigned root = 1;

  double b(double t) const { return std::pow(t, 1.0 / model.alpha); }
  double operator()(double t) const {
    return std::pow(t, 1.0 / (static_cast<double>(root) * model.alpha));
  }
};

enum class LevyMode { JumpListOnly, FullPath };

struct LevyConfig {
  TailModel model{1.0, TailForm::CanonicalLevyMeasure};
  double small_jump_cutoff = 1e-3;
  bool include_brownian = false;
  double sigma = 0.0;
  double drift = 0.0;
  LevyMode mode = LevyMode::JumpListOnly;

  void validate() const {
    model.validate();
    if (model.form != TailForm::CanonicalLevyMeasure)
      throw ConfigError("Levy sampling requires the CanonicalLevyMeasure tail form");
    if (!(small_jump_cutoff > 0.0 && small_jump_cutoff <= 1.0))
      throw ConfigError("small_jump_cutoff must lie in (0, 1]");
    if (!(sigma >= 0.0) || !std::isfinite(sigma)) throw ConfigError("sigma must be >= 0");
    if (!std::isfinite(drift)) throw ConfigError("drift must be finite");
  }
};

// ---------------------------------------------------------------------------
// Pareto variables and vectors

inline double pareto_quantile(double u, double alpha) { return std::pow(u, -1.0 / alpha); }

template <class Rng>
double sample_pareto(const TailModel& model, Rng& rng) {
  model.validate();
  if (model.form != TailForm::ParetoVariable)
    throw ConfigError("sample_pareto requires the ParetoVariable tail form");
  return pareto_quantile(uniform_open(rng), model.alpha);
}

/// Fills `out` with independent Pareto(alpha) draws.
template <class Rng>
void sample_iid_into(const TailModel& model, std::span<double> out, Rng& rng) {
  model.validate();
  if (model.form != TailForm::ParetoVariable)
    throw ConfigError("iid vectors use the ParetoVariable tail form");
  const double e = -1.0 / model.alpha;
  for (double& x : out) x = std::pow(uniform_open(rng), e);
}

template <class Rng>
FiniteVector sample_iid_vector(const TailModel& model, std::size_t p, Rng& rng) {
  if (p == 0) throw DomainError("sample_iid_vector: p must be >= 1");
  std::vector<double> v(p);
  sample_iid_into(model, std::span<double>(v), rng);
  return FiniteVector(std::move(v));
}

template <class Rng>
TruncatedSequence sample_iid_sequence(const TailModel& model, std::size_t p, Rng& rng,
                                      std::size_t depth = kDefaultTruncationDepth) {
  if (p == 0 || p > depth) throw DomainError("sample_iid_sequence: need 1 <= p <= depth");
  std::vector<double> v(p);
  sample_iid_into(model, std::span<double>(v), rng);
  return TruncatedSequence(std::move(v), depth);
}

// ---------------------------------------------------------------------------
// Poisson points

/// Q^{<-}(y) = y^{-1/alpha}.
inline double levy_tail_inverse(double y, double alpha) { return std::pow(y, -1.0 / alpha); }

/// First out.size() points Q^{<-}(Gamma_l), Gamma_l = E_1 + ... + E_l, in
/// decreasing order.
template <class Rng>
void poisson_points_into(const TailModel& model, std::span<double> out, Rng& rng) {
  model.validate();
  if (model.form != TailForm::CanonicalLevyMeasure)
    throw ConfigError("Poisson points use the CanonicalLevyMeasure tail form");
  double gamma = 0.0;
  const double e = -1.0 / model.alpha;
  for (double& x : out) {
    gamma += exponential(rng);
    x = std::pow(gamma, e);
  }
}

template <class Rng>
TruncatedSequence sample_poisson_points(const TailModel& model, std::size_t m, Rng& rng,
                                        std::size_t depth = kDefaultTruncationDepth) {
  if (m == 0 || m > depth) throw DomainError("sample_poisson_points: need 1 <= m <= depth");
  std::vector<double> v(m);
  poisson_points_into(model, std::span<double>(v), rng);
  return TruncatedSequence(std::move(v), depth);
}

// ---------------------------------------------------------------------------
// Jump paths

namespace detail {

// Points Q^{<-}(Gamma_l) >= cutoff with independent uniform times, assembled
// by T_m. Colliding times are redrawn.
template <class Rng>
StepFunction jumps_above(double alpha, double cutoff, Rng& rng) {
  const double gamma_max = std::pow(cutoff, -alpha);
  std::vector<double> sizes;
  double gamma = exponential(rng);
  while (gamma <= gamma_max) {
    sizes.push_back(levy_tail_inverse(gamma, alpha));
    gamma += exponential(rng);
  }
  if (sizes.empty()) return StepFunction{};
  std::vector<double> times(sizes.size());
  for (double& u : times) u = uniform_open(rng);
  if (times.size() > 1) {
    std::vector<double> sorted = times;
    for (bool collided = true; collided;) {
      sorted = times;
      std::sort(sorted.begin(), sorted.end());
      collided = false;
      for (std::size_t i = 1; i < sorted.size(); ++i)
        if (sorted[i] == sorted[i - 1]) {
          collided = true;
          *std::find(times.begin(), times.end(), sorted[i]) = uniform_open(rng);
          break;
        }
    }
  }
  const std::size_t m = sizes.size();
  return t_m(TruncatedSequence(std::move(sizes), m), times, m);
}

}  // namespace detail

/// int_eps^1 x nu(dx) for nu(dx) = alpha x^{-alpha-1} dx.
inline double small_jump_compensator(double alpha, double eps) {
  if (std::abs(alpha - 1.0) < 1e-12) return -std::log(eps);
  return alpha * (1.0 - std::pow(eps, 1.0 - alpha)) / (1.0 - alpha);
}

/// Compound Poisson path of the jumps >= small_jump_cutoff; the jump count is
/// Poisson(cutoff^{-alpha}).
template <class Rng>
StepFunction sample_compound_poisson(const LevyConfig& config, Rng& rng) {
  config.validate();
  if (config.mode != LevyMode::JumpListOnly)
    throw ConfigError("sample_compound_poisson expects mode JumpListOnly");
  return detail::jumps_above(config.model.alpha, config.small_jump_cutoff, rng);
}

struct SmallJumpSummary {
  double sup_abs;   // sup_{s in [0,1]} |X~_s|
  double terminal;  // X~_1
};

/// Walks the compensated small-jump process X~_s = sum_{jumps in [eps,1),
/// time <= s} x - s c(eps) + drift s in time order. The path is linear between
/// jumps, so the sup is exact. When grid_values is non-empty it receives X~
/// at the times k / (grid_values.size() - 1).
template <class Rng>
SmallJumpSummary sample_small_jump_part(double alpha, double eps, double drift, Rng& rng,
                                        std::span<double> grid_values = {}) {
  const double slope = drift - small_jump_compensator(alpha, eps);
  const double rate = std::pow(eps, -alpha) - 1.0;
  const double e = -1.0 / alpha;
  const std::size_t n_grid = grid_values.size();
  std::size_t next_grid = 0;
  double jump_sum = 0.0;
  double sup = 0.0;
  auto fill_grid_until = [&](double s) {
    while (next_grid < n_grid) {
      const double g = static_cast<double>(next_grid) / static_cast<double>(n_grid - 1);
      if (g >= s) break;
      grid_values[next_grid++] = jump_sum + slope * g;
    }
  };
  double s = rate > 0.0 ? exponential(rng) / rate : 2.0;
  while (s <= 1.0) {
    fill_grid_until(s);
    const double left = jump_sum + slope * s;
    const double size = std::pow(1.0 + uniform_open(rng) * rate, e);
    jump_sum += size;
    sup = std::max({sup, std::abs(left), std::abs(left + size)});
    s += exponential(rng) / rate;
  }
  const double terminal = jump_sum + slope;
  fill_grid_until(1.0);
  if (n_grid > 0) {
    while (next_grid < n_grid) grid_values[next_grid++] = terminal;
  }
  return {std::max(sup, std::abs(terminal)), terminal};
}

struct LevyPath {
  std::vector<double> grid_times;
  std::vector<double> values;  // X at grid_times
  StepFunction large_jumps;    // J: jumps >= 1
  double small_sup = 0.0;      // sup |X~|, see sample_levy_path
  double small_terminal = 0.0; // X~_1
};

/// X = J + X~ with J the jumps >= 1 and X~ the compensated jumps in [eps, 1)
/// plus drift and (optionally) sigma B. small_sup is exact when sigma == 0 and
/// taken over the grid otherwise.
template <class Rng>
LevyPath sample_levy_path(const LevyConfig& config, std::size_t n_grid, Rng& rng) {
  config.validate();
  if (config.mode != LevyMode::FullPath) throw ConfigError("sample_levy_path expects mode FullPath");
  if (n_grid < 2) throw ConfigError("sample_levy_path: n_grid must be >= 2");
  LevyPath path;
  path.large_jumps = detail::jumps_above(config.model.alpha, 1.0, rng);
  path.grid_times.resize(n_grid);
  for (std::size_t k = 0; k < n_grid; ++k)
    path.grid_times[k] = static_cast<double>(k) / static_cast<double>(n_grid - 1);

  std::vector<double> small(n_grid, 0.0);
  SmallJumpSummary summary{0.0, 0.0};
  if (config.small_jump_cutoff < 1.0 || config.drift != 0.0) {
    summary = sample_small_jump_part(config.model.alpha, config.small_jump_cutoff, config.drift,
                                     rng, std::span<double>(small));
  }
  path.small_sup = summary.sup_abs;
  path.small_terminal = summary.terminal;

  if (config.include_brownian && config.sigma > 0.0) {
    const double dt = 1.0 / static_cast<double>(n_grid - 1);
    double b = 0.0;
    double sup = 0.0;
    for (std::size_t k = 1; k < n_grid; ++k) {
      // Box-Muller, one normal per pair of uniforms.
      const double r = std::sqrt(-2.0 * std::log(uniform_open(rng)));
      const double z = r * std::cos(2.0 * std::numbers::pi * uniform_open(rng));
      b += config.sigma * std::sqrt(dt) * z;
      small[k] += b;
      sup = std::max(sup, std::abs(small[k]));
    }
    path.small_sup = sup;
    path.small_terminal = small.back();
  }

  path.values.resize(n_grid);
  for (std::size_t k = 0; k < n_grid; ++k)
    path.values[k] = small[k] + path.large_jumps(path.grid_times[k]);
  return path;
}

}  // namespace hrv

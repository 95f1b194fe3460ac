#pragma once

// Finite point measures, restriction outside C^r, and the computable metrics
// behind M_O convergence: Prohorov on atom sets, a bounded-Lipschitz lower
// bound, and the integrated distance d_{M_O}.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "hrv/errors.hpp"
#include "hrv/points.hpp"
#include "hrv/rng.hpp"
#include "hrv/spaces.hpp"

namespace hrv {

struct Atom {
  Point location;
  double weight;
};

class PointMeasure {
 public:
  PointMeasure() = default;
  explicit PointMeasure(std::vector<Atom> atoms) : atoms_(std::move(atoms)) {
    for (const auto& a : atoms_)
      if (!(a.weight > 0.0) || !std::isfinite(a.weight))
        throw DomainError("PointMeasure: atom weights must be finite and > 0");
  }

  static PointMeasure dirac(Point x, double weight = 1.0) {
    return PointMeasure({Atom{std::move(x), weight}});
  }

  const std::vector<Atom>& atoms() const noexcept { return atoms_; }
  std::size_t size() const noexcept { return atoms_.size(); }
  bool empty() const noexcept { return atoms_.empty(); }

  double mass() const noexcept {
    double s = 0.0;
    for (const auto& a : atoms_) s += a.weight;
    return s;
  }

 private:
  std::vector<Atom> atoms_;
};

/// Atoms at distance >= r from the cone (the closed set S \ C^r).
inline PointMeasure restrict(const PointMeasure& mu, const ConeSpec& cone, double r) {
  if (!(r > 0.0)) throw DomainError("restrict: r must be > 0");
  std::vector<Atom> kept;
  for (const auto& a : mu.atoms())
    if (cone.distance(a.location) >= r) kept.push_back(a);
  return PointMeasure(std::move(kept));
}

/// Atoms at the samples with weight t/N each, so the total mass is t.
inline PointMeasure empirical(std::vector<Point> samples, double t) {
  if (samples.empty()) throw DomainError("empirical: need at least one sample");
  if (!(t > 0.0)) throw DomainError("empirical: scale t must be > 0");
  const double w = t / static_cast<double>(samples.size());
  std::vector<Atom> atoms;
  atoms.reserve(samples.size());
  for (auto& s : samples) atoms.push_back({std::move(s), w});
  return PointMeasure(std::move(atoms));
}

// ---------------------------------------------------------------------------
// Prohorov distance

struct ProhorovOptions {
  double tol = 1e-6;
  std::size_t atom_cap = 200;
};

namespace detail {

/// Dinic max-flow on a small dense graph with real capacities.
class MaxFlow {
 public:
  explicit MaxFlow(std::size_t n) : adj_(n), level_(n), it_(n) {}

  void add_edge(std::size_t u, std::size_t v, double cap) {
    adj_[u].push_back({v, adj_[v].size(), cap});
    adj_[v].push_back({u, adj_[u].size() - 1, 0.0});
  }

  double run(std::size_t s, std::size_t t) {
    double flow = 0.0;
    while (bfs(s, t)) {
      std::fill(it_.begin(), it_.end(), 0);
      while (true) {
        const double f = dfs(s, t, std::numeric_limits<double>::infinity());
        if (!(f > 0.0)) break;
        flow += f;
      }
    }
    return flow;
  }

 private:
  struct Edge {
    std::size_t to, rev;
    double cap;
  };
  static constexpr double kEps = 1e-15;

  bool bfs(std::size_t s, std::size_t t) {
    std::fill(level_.begin(), level_.end(), -1);
    std::vector<std::size_t> queue{s};
    level_[s] = 0;
    for (std::size_t h = 0; h < queue.size(); ++h) {
      const auto u = queue[h];
      for (const auto& e : adj_[u])
        if (e.cap > kEps && level_[e.to] < 0) {
          level_[e.to] = level_[u] + 1;
          queue.push_back(e.to);
        }
    }
    return level_[t] >= 0;
  }

  double dfs(std::size_t u, std::size_t t, double pushed) {
    if (u == t) return pushed;
    for (auto& i = it_[u]; i < adj_[u].size(); ++i) {
      auto& e = adj_[u][i];
      if (e.cap > kEps && level_[e.to] == level_[u] + 1) {
        const double d = dfs(e.to, t, std::min(pushed, e.cap));
        if (d > 0.0) {
          e.cap -= d;
          adj_[e.to][e.rev].cap += d;
          return d;
        }
      }
    }
    return 0.0;
  }

  std::vector<std::vector<Edge>> adj_;
  std::vector<int> level_;
  std::vector<std::size_t> it_;
};

// max_A [from(A) - to(A^eps)] <= eps  <=>  transport along eps-close pairs
// moves at least from.mass - eps (max-flow / min-cut duality).
inline bool prohorov_one_sided(const std::vector<double>& wf, const std::vector<double>& wt,
                               const std::vector<std::vector<double>>& dist, bool transpose,
                               double eps) {
  const std::size_t nf = wf.size(), nt = wt.size();
  double from_mass = 0.0;
  for (const double w : wf) from_mass += w;
  if (from_mass <= eps) return true;
  MaxFlow g(nf + nt + 2);
  const std::size_t s = nf + nt, t = nf + nt + 1;
  for (std::size_t i = 0; i < nf; ++i) g.add_edge(s, i, wf[i]);
  for (std::size_t k = 0; k < nt; ++k) g.add_edge(nf + k, t, wt[k]);
  for (std::size_t i = 0; i < nf; ++i)
    for (std::size_t k = 0; k < nt; ++k) {
      const double d = transpose ? dist[k][i] : dist[i][k];
      if (d <= eps) g.add_edge(i, nf + k, std::numeric_limits<double>::infinity());
    }
  const double slack = 1e-12 * std::max(1.0, from_mass);
  return g.run(s, t) >= from_mass - eps - slack;
}

}  // namespace detail

/// Two-sided Prohorov distance between finite atomic measures of possibly
/// different total mass: inf{eps : mu(A) <= nu(A^eps) + eps and
/// nu(A) <= mu(A^eps) + eps for all A}. The returned value is feasible and
/// within options.tol of the infimum.
inline double prohorov(const PointMeasure& mu, const PointMeasure& nu, GroundMetric ground,
                       const ProhorovOptions& options = {}) {
  const std::size_t n = mu.size(), m = nu.size();
  if (n + m > options.atom_cap)
    throw NumericError("prohorov: " + std::to_string(n + m) + " atoms exceed the cap of " +
                       std::to_string(options.atom_cap) +
                       "; subsample the measures or use bounded_lipschitz");
  if (n == 0 && m == 0) return 0.0;

  std::vector<double> wm(n), wn(m);
  for (std::size_t i = 0; i < n; ++i) wm[i] = mu.atoms()[i].weight;
  for (std::size_t k = 0; k < m; ++k) wn[k] = nu.atoms()[k].weight;
  std::vector<std::vector<double>> dist(n, std::vector<double>(m));
  double diam = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < m; ++k) {
      dist[i][k] = ground_distance(mu.atoms()[i].location, nu.atoms()[k].location, ground);
      diam = std::max(diam, dist[i][k]);
    }

  auto feasible = [&](double eps) {
    return detail::prohorov_one_sided(wm, wn, dist, false, eps) &&
           detail::prohorov_one_sided(wn, wm, dist, true, eps);
  };
  if (feasible(0.0)) return 0.0;
  double lo = 0.0;
  double hi = std::max(1.0, std::abs(mu.mass() - nu.mass()) + diam);
  while (!feasible(hi)) {
    lo = hi;
    hi *= 2.0;
  }
  while (hi - lo > options.tol) {
    const double mid = 0.5 * (lo + hi);
    (feasible(mid) ? hi : lo) = mid;
  }
  return hi;
}

// ---------------------------------------------------------------------------
// Bounded-Lipschitz lower bound

/// sup over a deterministic pseudo-random family of n_probe test functions
/// that are 1-Lipschitz and bounded by 1 of |mu(f) - nu(f)|. Probes are
/// centred on the atoms of both measures at radii 2^{-level} (jittered):
/// bumps max(0, r - d(x, c)) and caps min(d(x, c), r). The family for n is a
/// prefix of the family for n + 1, so the result is monotone in n_probe.
inline double bounded_lipschitz(const PointMeasure& mu, const PointMeasure& nu,
                                GroundMetric ground, std::size_t n_probe) {
  std::vector<const Atom*> all;
  for (const auto& a : mu.atoms()) all.push_back(&a);
  for (const auto& a : nu.atoms()) all.push_back(&a);
  if (all.empty()) return 0.0;

  // Distances from every centre to every atom, computed once.
  const std::size_t na = all.size();
  std::vector<double> d(na * na);
  for (std::size_t c = 0; c < na; ++c)
    for (std::size_t k = 0; k < na; ++k)
      d[c * na + k] = c == k ? 0.0 : ground_distance(all[c]->location, all[k]->location, ground);

  const std::size_t n_mu = mu.size();
  double best = 0.0;
  for (std::size_t probe = 0; probe < n_probe; ++probe) {
    const std::size_t centre = probe % na;
    const std::size_t idx = probe / na;
    const bool bump = idx % 2 == 0;
    const auto level = static_cast<int>(std::min<std::size_t>(idx / 2, 60));
    const double jitter =
        0.75 + 0.25 * (static_cast<double>(splitmix64(0xB1ull ^ probe) >> 11) * 0x1.0p-53);
    const double r = std::ldexp(jitter, -level);
    double side[2] = {0.0, 0.0};
    for (std::size_t k = 0; k < na; ++k) {
      const double dist = d[centre * na + k];
      const double f = bump ? std::max(0.0, r - dist) : std::min(dist, r);
      side[k < n_mu ? 0 : 1] += all[k]->weight * f;
    }
    best = std::max(best, std::abs(side[0] - side[1]));
  }
  return best;
}

// ---------------------------------------------------------------------------
// d_{M_O}

struct M0Quadrature {
  double r_min = 1e-3;
  double r_max = 20.0;
  std::size_t points = 200;
  bool use_bounded_lipschitz = false;
  std::size_t n_probe = 256;
  GroundMetric ground = GroundMetric::L1;
  ProhorovOptions prohorov{};
};

struct M0Result {
  double value;
  /// e^{-r_max} + r_min: the integrand is bounded by 1 and weighted by e^{-r}.
  double truncation_bound;
};

/// Geometric grid r_min * rho^k, k = 0..points-1, ending at r_max and nudged
/// by a fixed irrational factor so that it avoids atoms at round distances.
inline std::vector<double> m0_grid(const M0Quadrature& q) {
  if (!(q.r_min > 0.0) || !(q.r_max > q.r_min) || q.points < 2)
    throw ConfigError("m0 quadrature: need 0 < r_min < r_max and at least 2 points");
  const double rho = std::pow(q.r_max / q.r_min, 1.0 / static_cast<double>(q.points - 1));
  const double nudge = 1.0 + 1e-9 * std::sqrt(2.0);
  std::vector<double> r(q.points);
  for (std::size_t k = 0; k < q.points; ++k)
    r[k] = q.r_min * std::pow(rho, static_cast<double>(k)) * nudge;
  return r;
}

/// d_{M_O}(mu, nu) = int_0^inf e^{-r} p_r(mu^(r), nu^(r)) / (1 + p_r) dr by the
/// trapezoid rule on m0_grid.
inline M0Result m0_distance(const PointMeasure& mu, const PointMeasure& nu, const ConeSpec& cone,
                            const M0Quadrature& q = {}) {
  const auto grid = m0_grid(q);
  std::vector<double> f(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const auto mr = restrict(mu, cone, grid[k]);
    const auto nr = restrict(nu, cone, grid[k]);
    const double p = q.use_bounded_lipschitz ? bounded_lipschitz(mr, nr, q.ground, q.n_probe)
                                             : prohorov(mr, nr, q.ground, q.prohorov);
    f[k] = std::exp(-grid[k]) * p / (1.0 + p);
  }
  // Neumaier-compensated trapezoid sum.
  double sum = 0.0, comp = 0.0;
  for (std::size_t k = 0; k + 1 < grid.size(); ++k) {
    const double term = 0.5 * (f[k] + f[k + 1]) * (grid[k + 1] - grid[k]);
    const double s = sum + term;
    comp += std::abs(sum) >= std::abs(term) ? (sum - s) + term : (term - s) + sum;
    sum = s;
  }
  return {sum + comp, std::exp(-q.r_max) + q.r_min};
}

}  // namespace hrv

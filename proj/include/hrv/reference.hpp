#pragma once

// Exhaustive reference implementations used to cross-check the fast paths.
// Exponential in the instance size; meant for a handful of atoms or indices.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "hrv/errors.hpp"
#include "hrv/measures.hpp"
#include "hrv/spaces.hpp"

namespace hrv::reference {

namespace detail {

inline double subset_mass(const std::vector<double>& w, std::uint32_t mask) {
  double s = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i)
    if (mask & (1u << i)) s += w[i];
  return s;
}

// mu(A) <= nu(A^eps) + eps for every A, A^eps the closed eps-neighbourhood.
inline bool dominated(const std::vector<double>& wf, const std::vector<double>& wt,
                      const std::vector<std::vector<double>>& d, bool transposed, double eps) {
  const std::size_t n = wf.size(), m = wt.size();
  for (std::uint32_t a = 1; a < (1u << n); ++a) {
    std::uint32_t nb = 0;
    for (std::size_t k = 0; k < m; ++k)
      for (std::size_t i = 0; i < n; ++i)
        if ((a & (1u << i)) && (transposed ? d[k][i] : d[i][k]) <= eps) {
          nb |= 1u << k;
          break;
        }
    if (subset_mass(wf, a) > subset_mass(wt, nb) + eps + 1e-12) return false;
  }
  return true;
}

}  // namespace detail

/// Prohorov distance by enumeration. The infimum is attained at a pairwise
/// distance or at a difference of subset masses, so checking every such
/// candidate by full subset enumeration gives the exact value.
inline double prohorov_exhaustive(const PointMeasure& mu, const PointMeasure& nu,
                                  GroundMetric ground) {
  const std::size_t n = mu.size(), m = nu.size();
  if (n > 12 || m > 12) throw NumericError("prohorov_exhaustive: at most 12 atoms per side");
  std::vector<double> wm(n), wn(m);
  for (std::size_t i = 0; i < n; ++i) wm[i] = mu.atoms()[i].weight;
  for (std::size_t k = 0; k < m; ++k) wn[k] = nu.atoms()[k].weight;
  std::vector<std::vector<double>> d(n, std::vector<double>(m));
  std::vector<double> candidates{0.0};
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < m; ++k) {
      d[i][k] = ground_distance(mu.atoms()[i].location, nu.atoms()[k].location, ground);
      candidates.push_back(d[i][k]);
    }
  for (std::uint32_t a = 0; a < (1u << n); ++a)
    for (std::uint32_t b = 0; b < (1u << m); ++b) {
      const double diff = detail::subset_mass(wm, a) - detail::subset_mass(wn, b);
      candidates.push_back(std::abs(diff));
    }
  std::sort(candidates.begin(), candidates.end());
  for (const double eps : candidates)
    if (detail::dominated(wm, wn, d, false, eps) && detail::dominated(wn, wm, d, true, eps))
      return eps;
  throw NumericError("prohorov_exhaustive: no feasible candidate");
}

/// d_inf distance to sequences with at most j positive terms, by enumerating
/// every kept index set of size min(j, prefix).
inline double seq_cone_distance_exhaustive(const TruncatedSequence& x, std::size_t j) {
  const std::size_t n = x.prefix_size();
  if (n > 20) throw NumericError("seq_cone_distance_exhaustive: prefix too long");
  const std::size_t keep = std::min(j, n);
  double best = d_inf(x, TruncatedSequence{});
  for (std::uint32_t s = 0; s < (1u << n); ++s) {
    if (static_cast<std::size_t>(__builtin_popcount(s)) != keep) continue;
    std::vector<double> y(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
      if (s & (1u << i)) y[i] = x[i];
    best = std::min(best, d_inf(x, TruncatedSequence(std::move(y), x.depth())));
  }
  return best;
}

/// L1 distance to the nearest point with at most j positive coordinates, by
/// enumerating every support of size min(j, p).
inline double vector_cone_distance_exhaustive(const FiniteVector& x, std::size_t j) {
  const std::size_t n = x.size();
  if (n > 20) throw NumericError("vector_cone_distance_exhaustive: dimension too large");
  const std::size_t keep = std::min(j, n);
  double best = std::numeric_limits<double>::infinity();
  for (std::uint32_t s = 0; s < (1u << n); ++s) {
    if (static_cast<std::size_t>(__builtin_popcount(s)) != keep) continue;
    std::vector<double> y(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
      if (s & (1u << i)) y[i] = x[i];
    best = std::min(best, d_p(x, FiniteVector(std::move(y))));
  }
  return best;
}

}  // namespace hrv::reference

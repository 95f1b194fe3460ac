#pragma once

// Monte Carlo estimation of t P[sample / b(t^{1/k}) in A], sweeps over t and
// open/closed bracketing of a threshold set.
//
// Replications are split into fixed-size chunks; chunk c of (t index, set
// index) always draws from derive_engine(seed, {t_idx, set_idx, c}), so the
// result does not depend on the number of workers.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include "hrv/errors.hpp"
#include "hrv/oracles.hpp"
#include "hrv/rng.hpp"
#include "hrv/samplers.hpp"

namespace hrv {

enum class Generator { IidVector, PoissonPoints, CompoundPoisson, LevyPath };

inline const char* generator_name(Generator g) {
  switch (g) {
    case Generator::IidVector: return "IidVector";
    case Generator::PoissonPoints: return "PoissonPoints";
    case Generator::CompoundPoisson: return "CompoundPoisson";
    case Generator::LevyPath: return "LevyPath";
  }
  return "?";
}

struct ExperimentSpec {
  Generator generator = Generator::IidVector;
  double alpha = 1.0;
  std::size_t order_j = 0;
  std::vector<TestSet> test_sets;
  std::vector<double> t_grid;
  std::uint64_t replications = 0;
  std::uint64_t master_seed = 0;
  LevyConfig levy{};           // CompoundPoisson / LevyPath only; alpha comes from ExperimentSpec::alpha
  std::size_t levy_grid = 257; // LevyPath grid resolution
  unsigned workers = 0;        // 0: hardware concurrency
};

inline constexpr std::uint64_t kChunkSize = 65536;

/// k in b(t^{1/k}): j+1 for iid vectors, j for the Poisson and Levy generators.
inline std::size_t scaling_root(Generator g, std::size_t order_j) {
  return g == Generator::IidVector ? order_j + 1 : order_j;
}

inline LimitMeasureId limit_measure_for(Generator g, std::size_t order_j, double alpha) {
  switch (g) {
    case Generator::IidVector: return {LimitMeasureId::Kind::MuIid, order_j, alpha};
    case Generator::PoissonPoints: return {LimitMeasureId::Kind::MuPoissonOrdered, order_j, alpha};
    default: return {LimitMeasureId::Kind::MuLevy, order_j, alpha};
  }
}

struct EstimateRecord {
  std::string generator;
  double alpha = 0.0;
  std::size_t order_j = 0;
  std::string set_id;
  double t = 0.0;
  std::uint64_t n = 0;
  std::uint64_t hits = 0;
  double estimate = 0.0;
  double std_error = 0.0;
  double oracle = 0.0;
  double rel_error = 0.0;  // NaN when the oracle is 0
  bool unstable = false;   // fewer than 10 expected hits
};

namespace detail {

inline bool compatible(Generator g, const TestSet& s) {
  const auto& f = s.family();
  switch (g) {
    case Generator::IidVector:
      return std::holds_alternative<IidRect>(f) || std::holds_alternative<SumTail>(f);
    case Generator::PoissonPoints: return std::holds_alternative<OrderedRect>(f);
    case Generator::CompoundPoisson:
    case Generator::LevyPath: return std::holds_alternative<JumpSet>(f);
  }
  return false;
}

// Coordinates an iid sample needs to decide membership.
inline std::size_t flat_dimension(const TestSet& s) {
  return std::visit(
      [](const auto& f) -> std::size_t {
        using F = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<F, IidRect>) return f.indices.back();
        else if constexpr (std::is_same_v<F, SumTail>) return f.p;
        else return f.thresholds.size();
      },
      s.family());
}

inline void validate_common(const ExperimentSpec& spec) {
  if (!(spec.alpha > 0.0) || !std::isfinite(spec.alpha)) throw ConfigError("alpha must be > 0");
  if (spec.replications == 0) throw ConfigError("replications must be >= 1");
  if (spec.generator != Generator::IidVector && spec.order_j == 0)
    throw ConfigError(std::string(generator_name(spec.generator)) + " needs order_j >= 1");
}

inline void validate_set(const ExperimentSpec& spec, const TestSet& set) {
  if (!compatible(spec.generator, set))
    throw ConfigError("test set " + set.id() + " (" + set.family_name() +
                      ") cannot be used with generator " + generator_name(spec.generator));
  if (!(set.clearance() > 0.0)) throw ConfigError("test set " + set.id() + " has zero clearance");
  if (spec.generator != Generator::IidVector && set.order() != spec.order_j)
    throw ConfigError("test set " + set.id() + " must have exactly order_j thresholds");
}

inline LevyConfig levy_for(const ExperimentSpec& spec) {
  LevyConfig c = spec.levy;
  c.model = TailModel{spec.alpha, TailForm::CanonicalLevyMeasure};
  c.mode = spec.generator == Generator::LevyPath ? LevyMode::FullPath : LevyMode::JumpListOnly;
  return c;
}

// Splits [0, n) into kChunkSize chunks processed by `workers` threads; `body`
// gets (chunk index, first replication, count) and returns a vector of hit
// counts that is summed element-wise.
template <class Body>
std::vector<std::uint64_t> run_chunks(std::uint64_t n, unsigned workers, std::size_t width,
                                      Body body) {
  const std::uint64_t chunks = (n + kChunkSize - 1) / kChunkSize;
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::uint64_t>(workers, chunks));
  std::vector<std::atomic<std::uint64_t>> totals(width);
  for (auto& t : totals) t.store(0);
  std::atomic<std::uint64_t> next{0};
  std::exception_ptr error;
  std::atomic<bool> failed{false};
  auto worker = [&] {
    try {
      for (std::uint64_t c = next++; c < chunks && !failed; c = next++) {
        const std::uint64_t first = c * kChunkSize;
        const std::uint64_t count = std::min(kChunkSize, n - first);
        const auto local = body(c, first, count);
        for (std::size_t k = 0; k < width; ++k) totals[k] += local[k];
      }
    } catch (...) {
      if (!failed.exchange(true)) error = std::current_exception();
    }
  };
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (error) std::rethrow_exception(error);
  std::vector<std::uint64_t> out(width);
  for (std::size_t k = 0; k < width; ++k) out[k] = totals[k].load();
  return out;
}

// Hit counts of `sets` (sharing every sample) at scale b(t^{1/root}).
inline std::vector<std::uint64_t> count_hits(const ExperimentSpec& spec, double t,
                                             std::size_t t_idx, std::size_t set_idx,
                                             const std::vector<TestSet>& sets) {
  const double scale =
      ScalingFunction{TailModel{spec.alpha, TailForm::ParetoVariable},
                      static_cast<unsigned>(scaling_root(spec.generator, spec.order_j))}(t);
  const std::size_t width = sets.size();

  switch (spec.generator) {
    case Generator::IidVector:
    case Generator::PoissonPoints: {
      std::size_t dim = 1;
      for (const auto& s : sets) dim = std::max(dim, flat_dimension(s));
      const TailModel model{spec.alpha, spec.generator == Generator::IidVector
                                            ? TailForm::ParetoVariable
                                            : TailForm::CanonicalLevyMeasure};
      const bool iid = spec.generator == Generator::IidVector;
      return run_chunks(spec.replications, spec.workers, width,
                        [&](std::uint64_t c, std::uint64_t, std::uint64_t count) {
                          auto rng = derive_engine(spec.master_seed, {t_idx, set_idx, c});
                          std::vector<double> x(dim);
                          std::vector<std::uint64_t> h(width, 0);
                          for (std::uint64_t r = 0; r < count; ++r) {
                            if (iid) sample_iid_into(model, std::span<double>(x), rng);
                            else poisson_points_into(model, std::span<double>(x), rng);
                            for (std::size_t k = 0; k < width; ++k)
                              h[k] += sets[k].contains(std::span<const double>(x), scale) ? 1 : 0;
                          }
                          return h;
                        });
    }
    case Generator::CompoundPoisson:
    case Generator::LevyPath: {
      const LevyConfig config = levy_for(spec);
      config.validate();
      const bool full = spec.generator == Generator::LevyPath;
      return run_chunks(spec.replications, spec.workers, width,
                        [&](std::uint64_t c, std::uint64_t, std::uint64_t count) {
                          auto rng = derive_engine(spec.master_seed, {t_idx, set_idx, c});
                          std::vector<std::uint64_t> h(width, 0);
                          for (std::uint64_t r = 0; r < count; ++r) {
                            const StepFunction path =
                                full ? sample_levy_path(config, spec.levy_grid, rng).large_jumps
                                     : sample_compound_poisson(config, rng);
                            for (std::size_t k = 0; k < width; ++k)
                              h[k] += sets[k].contains(path, scale) ? 1 : 0;
                          }
                          return h;
                        });
    }
  }
  throw ConfigError("unknown generator");
}

inline EstimateRecord make_record(const ExperimentSpec& spec, const TestSet& set, double t,
                                  std::uint64_t hits, const std::string& set_id) {
  EstimateRecord rec;
  rec.generator = generator_name(spec.generator);
  rec.alpha = spec.alpha;
  rec.order_j = spec.order_j;
  rec.set_id = set_id;
  rec.t = t;
  rec.n = spec.replications;
  rec.hits = hits;
  const double n = static_cast<double>(spec.replications);
  const double p = static_cast<double>(hits) / n;
  rec.estimate = t * p;
  rec.std_error = t * std::sqrt(p * (1.0 - p) / n);
  rec.oracle = evaluate(limit_measure_for(spec.generator, spec.order_j, spec.alpha), set);
  rec.rel_error = rec.oracle > 0.0 ? (rec.estimate - rec.oracle) / rec.oracle
                                   : std::numeric_limits<double>::quiet_NaN();
  rec.unstable = n * rec.oracle / t < 10.0;
  return rec;
}

}  // namespace detail

/// One (t, set) estimate; t_idx and set_idx select the random streams.
inline EstimateRecord estimate(const ExperimentSpec& spec, double t, const TestSet& set,
                               std::size_t t_idx = 0, std::size_t set_idx = 0) {
  detail::validate_common(spec);
  detail::validate_set(spec, set);
  if (!(t > 0.0) || !std::isfinite(t)) throw ConfigError("t must be finite and > 0");
  const auto hits = detail::count_hits(spec, t, t_idx, set_idx, {set});
  return detail::make_record(spec, set, t, hits[0], set.id());
}

/// Every (set, t) pair, rows ordered by set then t.
inline std::vector<EstimateRecord> convergence_sweep(const ExperimentSpec& spec) {
  detail::validate_common(spec);
  if (spec.t_grid.empty()) throw ConfigError("t_grid must not be empty");
  for (std::size_t i = 0; i < spec.t_grid.size(); ++i) {
    if (!(spec.t_grid[i] > 0.0) || !std::isfinite(spec.t_grid[i]))
      throw ConfigError("t_grid entries must be finite and > 0");
    if (i > 0 && !(spec.t_grid[i] > spec.t_grid[i - 1]))
      throw ConfigError("t_grid must be strictly increasing");
  }
  if (spec.test_sets.empty()) throw ConfigError("test_sets must not be empty");
  for (const auto& s : spec.test_sets) detail::validate_set(spec, s);

  std::vector<EstimateRecord> rows;
  rows.reserve(spec.t_grid.size() * spec.test_sets.size());
  for (std::size_t s = 0; s < spec.test_sets.size(); ++s)
    for (std::size_t i = 0; i < spec.t_grid.size(); ++i)
      rows.push_back(estimate(spec, spec.t_grid[i], spec.test_sets[s], i, s));
  return rows;
}

struct Bracket {
  EstimateRecord deflated;  // thresholds raised by delta
  EstimateRecord raw;
  EstimateRecord inflated;  // thresholds lowered by delta
};

/// The three sets share every sample, so deflated <= raw <= inflated holds
/// for the estimates as well as for the oracle values.
inline Bracket portmanteau_bracket(const ExperimentSpec& spec, double t, const TestSet& set,
                                   double delta, std::size_t t_idx = 0, std::size_t set_idx = 0) {
  detail::validate_common(spec);
  detail::validate_set(spec, set);
  if (!(delta >= 0.0) || !std::isfinite(delta)) throw DomainError("bracket: delta must be >= 0");
  if (delta >= set.clearance())
    throw DomainError("bracket: delta must be smaller than the set clearance " +
                      std::to_string(set.clearance()));
  if (!(t > 0.0) || !std::isfinite(t)) throw ConfigError("t must be finite and > 0");
  const std::vector<TestSet> sets{set.shifted(delta), set, set.shifted(-delta)};
  const auto hits = detail::count_hits(spec, t, t_idx, set_idx, sets);
  return {detail::make_record(spec, sets[0], t, hits[0], set.id() + ":deflated"),
          detail::make_record(spec, sets[1], t, hits[1], set.id()),
          detail::make_record(spec, sets[2], t, hits[2], set.id() + ":inflated")};
}

/// t P[sup |X~| > b(t^{1/j}) level] for the compensated small-jump part of a
/// Levy path. The same N paths are reused for every t, so the column is
/// nonincreasing in t. The limit is 0.
inline std::vector<EstimateRecord> negligibility_sweep(const LevyConfig& config, std::size_t order_j,
                                                       double level, const std::vector<double>& t_grid,
                                                       std::uint64_t n, std::uint64_t master_seed,
                                                       unsigned workers = 0,
                                                       std::size_t n_grid = 257) {
  config.validate();
  if (order_j == 0) throw ConfigError("order_j must be >= 1");
  if (n == 0) throw ConfigError("replications must be >= 1");
  if (t_grid.empty()) throw ConfigError("t_grid must not be empty");
  if (!(level > 0.0)) throw DomainError("level must be > 0");
  const double alpha = config.model.alpha;
  std::vector<double> cut(t_grid.size());
  for (std::size_t i = 0; i < t_grid.size(); ++i)
    cut[i] = ScalingFunction{TailModel{alpha}, static_cast<unsigned>(order_j)}(t_grid[i]) * level;
  const bool brownian = config.include_brownian && config.sigma > 0.0;
  LevyConfig full = config;
  full.mode = LevyMode::FullPath;

  const auto hits = detail::run_chunks(
      n, workers, t_grid.size(), [&](std::uint64_t c, std::uint64_t, std::uint64_t count) {
        auto rng = derive_engine(master_seed, {0xD5ull, c});
        std::vector<std::uint64_t> h(cut.size(), 0);
        for (std::uint64_t r = 0; r < count; ++r) {
          const double sup = brownian ? sample_levy_path(full, n_grid, rng).small_sup
                                      : sample_small_jump_part(alpha, config.small_jump_cutoff,
                                                               config.drift, rng)
                                            .sup_abs;
          for (std::size_t i = 0; i < cut.size(); ++i) h[i] += sup > cut[i] ? 1 : 0;
        }
        return h;
      });

  std::vector<EstimateRecord> rows;
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    EstimateRecord rec;
    rec.generator = generator_name(Generator::LevyPath);
    rec.alpha = alpha;
    rec.order_j = order_j;
    char id[64];
    std::snprintf(id, sizeof id, "small_sup>%g", level);
    rec.set_id = id;
    rec.t = t_grid[i];
    rec.n = n;
    rec.hits = hits[i];
    const double p = static_cast<double>(hits[i]) / static_cast<double>(n);
    rec.estimate = t_grid[i] * p;
    rec.std_error = t_grid[i] * std::sqrt(p * (1.0 - p) / static_cast<double>(n));
    rec.oracle = 0.0;
    rec.rel_error = std::numeric_limits<double>::quiet_NaN();
    rec.unstable = true;
    rows.push_back(rec);
  }
  return rows;
}

namespace detail {
inline std::string fmt10(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}
}  // namespace detail

inline void write_csv(std::ostream& os, const std::vector<EstimateRecord>& rows) {
  os << "generator,alpha,order_j,set_id,t,N,estimate,std_error,oracle,rel_error,unstable_flag\n";
  for (const auto& r : rows) {
    os << r.generator << ',' << detail::fmt10(r.alpha) << ',' << r.order_j << ',' << r.set_id
       << ',' << detail::fmt10(r.t) << ',' << r.n << ',' << detail::fmt10(r.estimate) << ','
       << detail::fmt10(r.std_error) << ',' << detail::fmt10(r.oracle) << ','
       << detail::fmt10(r.rel_error) << ',' << (r.unstable ? 1 : 0) << '\n';
  }
}

}  // namespace hrv

#pragma once

// Executes a validated RunConfig: experiments write CSV, metric and
// transform-demo modes write JSON.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "hrv/config.hpp"
#include "hrv/harness.hpp"
#include "hrv/io.hpp"
#include "hrv/measures.hpp"
#include "hrv/transforms.hpp"

namespace hrv {

namespace exit_code {
inline constexpr int kOk = 0;
inline constexpr int kConfig = 2;
inline constexpr int kNumeric = 3;
}  // namespace exit_code

struct RunOverrides {
  std::optional<std::string> output;
  std::optional<unsigned> workers;
  std::optional<std::uint64_t> seed;
};

inline void apply_overrides(config::RunConfig& rc, const RunOverrides& o) {
  if (o.output) rc.output = *o.output;
  if (o.workers) rc.spec.workers = *o.workers;
  if (o.seed) rc.spec.master_seed = *o.seed;
}

namespace detail {

using json = nlohmann::json;

inline std::string g10(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

inline void summarize(std::ostream& os, const std::vector<EstimateRecord>& rows) {
  // One line per base set id, reporting its largest-t row.
  std::vector<std::string> order;
  std::vector<const EstimateRecord*> last;
  std::vector<std::size_t> counts;
  for (const auto& r : rows) {
    const std::string base = r.set_id.substr(0, r.set_id.find(':'));
    std::size_t k = 0;
    while (k < order.size() && order[k] != base) ++k;
    if (k == order.size()) {
      order.push_back(base);
      last.push_back(&r);
      counts.push_back(0);
    }
    ++counts[k];
    if (r.set_id == base && r.t >= last[k]->t) last[k] = &r;
  }
  for (std::size_t k = 0; k < order.size(); ++k) {
    const auto& r = *last[k];
    os << "set " << order[k] << ": " << counts[k] << " rows; t=" << g10(r.t)
       << " estimate=" << g10(r.estimate) << " +- " << g10(r.std_error)
       << " oracle=" << g10(r.oracle) << " rel_error=" << g10(r.rel_error)
       << (r.unstable ? " [unstable]" : "") << '\n';
  }
}

template <class Write>
void emit(const std::string& path, Write write) {
  if (path.empty() || path == "-") {
    write(std::cout);
    std::cout.flush();
    return;
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot open output file '" + path + "'");
  write(out);
  if (!out) throw NumericError("failed writing '" + path + "'");
}

inline std::vector<EstimateRecord> run_experiment(const config::RunConfig& rc) {
  const auto& spec = rc.spec;
  switch (rc.mode) {
    case config::Mode::Estimate: {
      std::vector<EstimateRecord> rows;
      for (std::size_t s = 0; s < spec.test_sets.size(); ++s)
        rows.push_back(estimate(spec, spec.t_grid.front(), spec.test_sets[s], 0, s));
      return rows;
    }
    case config::Mode::Sweep: return convergence_sweep(spec);
    case config::Mode::Bracket: {
      std::vector<EstimateRecord> rows;
      for (std::size_t s = 0; s < spec.test_sets.size(); ++s)
        for (std::size_t i = 0; i < spec.t_grid.size(); ++i) {
          const auto b = portmanteau_bracket(spec, spec.t_grid[i], spec.test_sets[s], rc.delta, i, s);
          rows.push_back(b.deflated);
          rows.push_back(b.raw);
          rows.push_back(b.inflated);
        }
      return rows;
    }
    default: break;
  }
  throw ConfigError("not an experiment mode");
}

inline json run_metric(const json& m) {
  const auto kind = m.at("kind").get<std::string>();
  const auto mu = io::measure_from_json(m.at("mu"), "metric.mu");
  const auto nu = io::measure_from_json(m.at("nu"), "metric.nu");
  GroundMetric ground = GroundMetric::L1;
  if (m.contains("ground")) ground = *config::detail::parse_ground(m.at("ground").get<std::string>());
  ProhorovOptions popt;
  if (m.contains("tol")) popt.tol = m.at("tol").get<double>();
  if (m.contains("atom_cap")) popt.atom_cap = m.at("atom_cap").get<std::size_t>();
  json out{{"kind", kind}, {"ground", ground_name(ground)}, {"atoms", {mu.size(), nu.size()}}};
  if (kind == "prohorov") {
    out["value"] = prohorov(mu, nu, ground, popt);
    out["tol"] = popt.tol;
  } else if (kind == "bounded_lipschitz") {
    const std::size_t n_probe = m.contains("n_probe") ? m.at("n_probe").get<std::size_t>() : 256;
    out["value"] = bounded_lipschitz(mu, nu, ground, n_probe);
    out["n_probe"] = n_probe;
  } else {
    config::detail::Validator v;
    const auto cone = config::detail::parse_cone(v, m.at("cone"), "metric.cone");
    if (!cone) throw config::ConfigErrors(v.problems);
    M0Quadrature q;
    q.ground = ground;
    q.prohorov = popt;
    if (m.contains("r_min")) q.r_min = m.at("r_min").get<double>();
    if (m.contains("r_max")) q.r_max = m.at("r_max").get<double>();
    if (m.contains("points")) q.points = m.at("points").get<std::size_t>();
    if (m.contains("n_probe")) q.n_probe = m.at("n_probe").get<std::size_t>();
    if (m.contains("use_bounded_lipschitz")) q.use_bounded_lipschitz = m.at("use_bounded_lipschitz").get<bool>();
    const auto r = m0_distance(mu, nu, *cone, q);
    out["cone"] = cone->name();
    out["value"] = r.value;
    out["truncation_bound"] = r.truncation_bound;
  }
  return out;
}

inline TruncatedSequence as_sequence(const Point& p) {
  if (const auto* s = std::get_if<TruncatedSequence>(&p)) return *s;
  if (const auto* v = std::get_if<FiniteVector>(&p))
    return TruncatedSequence(std::vector<double>(v->coords().begin(), v->coords().end()));
  throw TypeError("expected a sequence");
}

inline FiniteVector as_vector(const Point& p) {
  if (const auto* v = std::get_if<FiniteVector>(&p)) return *v;
  throw TypeError("expected a vector of R_+^p");
}

inline json polar_json(const PolarPair& pp) {
  return {{"radius", pp.radius}, {"angle", io::to_json(Point(pp.angle))}};
}

inline json run_transform(const json& t) {
  const auto op = t.at("op").get<std::string>();
  auto need = [&](const char* key) -> const json& {
    if (!t.contains(key)) throw ConfigError(std::string("transform.") + key + ": missing for op " + op);
    return t.at(key);
  };
  auto cone = [&]() {
    config::detail::Validator v;
    const auto c = config::detail::parse_cone(v, need("cone"), "transform.cone");
    if (!c) throw config::ConfigErrors(v.problems);
    return *c;
  };
  auto polar_pair = [&]() {
    return PolarPair{need("radius").get<double>(),
                     as_vector(io::point_from_json(need("angle"), "transform.angle"))};
  };
  json out{{"op", op}};
  if (op == "cumsum") {
    out["result"] = io::to_json(Point(cumsum(as_sequence(io::point_from_json(need("x"), "transform.x")))));
  } else if (op == "proj") {
    const auto x = as_sequence(io::point_from_json(need("x"), "transform.x"));
    out["result"] = io::to_json(Point(proj(x, need("p").get<std::size_t>())));
  } else if (op == "polar") {
    out["result"] = polar_json(polar(as_vector(io::point_from_json(need("x"), "transform.x"))));
  } else if (op == "polar_inv") {
    out["result"] = io::to_json(Point(polar_inv(polar_pair())));
  } else if (op == "gpolar") {
    const auto c = cone();
    out["cone"] = c.name();
    out["result"] = polar_json(gpolar(as_vector(io::point_from_json(need("x"), "transform.x")), c));
  } else if (op == "gpolar_inv") {
    const auto c = cone();
    out["cone"] = c.name();
    out["result"] = io::to_json(Point(gpolar_inv(polar_pair(), c)));
  } else if (op == "t_m") {
    const auto sizes = as_sequence(io::point_from_json(need("x"), "transform.x"));
    const auto times = need("times").get<std::vector<double>>();
    out["result"] = io::to_json(Point(t_m(sizes, times, need("m").get<std::size_t>())));
  } else {
    const auto& a = need("action");
    const auto kind = a.is_string() ? a.get<std::string>() : a.at("kind").get<std::string>();
    ScalarAction action = ScalarAction::standard();
    if (kind == "PowerWeights") action = ScalarAction::power_weights(a.at("gammas").get<std::vector<double>>());
    else if (kind == "SecondCoordOnly") action = ScalarAction::second_coord_only();
    else if (kind == "RadiusOnly") action = ScalarAction::radius_only();
    else if (kind != "Standard") throw ConfigError("transform.action: unknown action '" + kind + "'");
    out["action"] = action.name();
    out["result"] = io::to_json(
        apply_scaling(action, need("lambda").get<double>(), io::point_from_json(need("x"), "transform.x")));
  }
  return out;
}

}  // namespace detail

/// Runs `rc`; the per-set summary goes to `summary`. Errors propagate as
/// exceptions; see exit_code_for.
inline void execute(const config::RunConfig& rc, std::ostream& summary) {
  switch (rc.mode) {
    case config::Mode::Estimate:
    case config::Mode::Sweep:
    case config::Mode::Bracket: {
      const auto rows = detail::run_experiment(rc);
      detail::emit(rc.output, [&](std::ostream& os) { write_csv(os, rows); });
      detail::summarize(summary, rows);
      return;
    }
    case config::Mode::Metric: {
      const auto out = detail::run_metric(rc.metric);
      detail::emit(rc.output, [&](std::ostream& os) { os << out.dump(2) << '\n'; });
      summary << "metric " << out["kind"].get<std::string>() << ": " << out["value"].dump() << '\n';
      return;
    }
    case config::Mode::TransformDemo: {
      const auto out = detail::run_transform(rc.transform);
      detail::emit(rc.output, [&](std::ostream& os) { os << out.dump(2) << '\n'; });
      summary << "transform " << out["op"].get<std::string>() << ": done\n";
      return;
    }
  }
}

/// 2 for configuration and input errors, 3 for numeric failures.
inline int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const NumericError*>(&e) != nullptr) return exit_code::kNumeric;
  if (dynamic_cast<const std::runtime_error*>(&e) != nullptr &&
      dynamic_cast<const nlohmann::json::exception*>(&e) == nullptr)
    return exit_code::kNumeric;
  return exit_code::kConfig;
}

}  // namespace hrv

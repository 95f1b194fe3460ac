#pragma once

// JSON encoding of points, measures and estimate records.
//
//   vector    [x1, x2, ...]
//   sequence  {"sequence": [x1, ...], "depth": K}
//   step      {"step": {"base": b, "jumps": [[t1, s1], ...]}}
//   measure   [{"location": <point>, "weight": w}, ...]

#include <cmath>
#include <string>
#include <vector>

#include <json.hpp>

#include "hrv/errors.hpp"
#include "hrv/harness.hpp"
#include "hrv/measures.hpp"
#include "hrv/points.hpp"

namespace hrv::io {

using json = nlohmann::json;

namespace detail {
inline double number(const json& j, const std::string& where) {
  if (!j.is_number()) throw ConfigError(where + ": expected a number");
  return j.get<double>();
}

inline std::vector<double> numbers(const json& j, const std::string& where) {
  if (!j.is_array()) throw ConfigError(where + ": expected an array of numbers");
  std::vector<double> v;
  v.reserve(j.size());
  for (std::size_t i = 0; i < j.size(); ++i)
    v.push_back(number(j[i], where + "[" + std::to_string(i) + "]"));
  return v;
}
}  // namespace detail

inline json to_json(const Point& p) {
  if (const auto* v = std::get_if<FiniteVector>(&p))
    return json(std::vector<double>(v->coords().begin(), v->coords().end()));
  if (const auto* s = std::get_if<TruncatedSequence>(&p))
    return {{"sequence", std::vector<double>(s->prefix().begin(), s->prefix().end())},
            {"depth", s->depth()}};
  const auto& f = std::get<StepFunction>(p);
  json jumps = json::array();
  for (const auto& j : f.jumps()) jumps.push_back({j.time, j.size});
  return {{"step", {{"base", f.base()}, {"jumps", jumps}}}};
}

/// Throws ConfigError naming `where` on malformed input and the point's own
/// validation errors otherwise.
inline Point point_from_json(const json& j, const std::string& where = "point") {
  if (j.is_array()) return FiniteVector(detail::numbers(j, where));
  if (!j.is_object()) throw ConfigError(where + ": expected an array or an object");
  if (j.contains("sequence")) {
    for (const auto& [k, _] : j.items())
      if (k != "sequence" && k != "depth") throw ConfigError(where + ": unknown key '" + k + "'");
    std::size_t depth = kDefaultTruncationDepth;
    if (j.contains("depth")) {
      if (!j["depth"].is_number_integer() || j["depth"].get<long long>() < 1)
        throw ConfigError(where + ".depth: expected a positive integer");
      depth = j["depth"].get<std::size_t>();
    }
    return TruncatedSequence(detail::numbers(j["sequence"], where + ".sequence"), depth);
  }
  if (j.contains("step")) {
    if (j.size() != 1) throw ConfigError(where + ": 'step' must be the only key");
    const auto& s = j["step"];
    if (!s.is_object()) throw ConfigError(where + ".step: expected an object");
    double base = 0.0;
    std::vector<Jump> jumps;
    for (const auto& [k, v] : s.items()) {
      if (k == "base") {
        base = detail::number(v, where + ".step.base");
      } else if (k == "jumps") {
        if (!v.is_array()) throw ConfigError(where + ".step.jumps: expected an array");
        for (std::size_t i = 0; i < v.size(); ++i) {
          const auto pair = detail::numbers(v[i], where + ".step.jumps[" + std::to_string(i) + "]");
          if (pair.size() != 2)
            throw ConfigError(where + ".step.jumps[" + std::to_string(i) + "]: expected [time, size]");
          jumps.push_back({pair[0], pair[1]});
        }
      } else {
        throw ConfigError(where + ".step: unknown key '" + k + "'");
      }
    }
    return StepFunction(std::move(jumps), base);
  }
  throw ConfigError(where + ": object must have 'sequence' or 'step'");
}

inline json to_json(const PointMeasure& mu) {
  json out = json::array();
  for (const auto& a : mu.atoms()) out.push_back({{"location", to_json(a.location)}, {"weight", a.weight}});
  return out;
}

inline PointMeasure measure_from_json(const json& j, const std::string& where = "measure") {
  if (!j.is_array()) throw ConfigError(where + ": expected an array of atoms");
  std::vector<Atom> atoms;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string w = where + "[" + std::to_string(i) + "]";
    const auto& a = j[i];
    if (!a.is_object() || !a.contains("location"))
      throw ConfigError(w + ": expected {location, weight}");
    for (const auto& [k, _] : a.items())
      if (k != "location" && k != "weight") throw ConfigError(w + ": unknown key '" + k + "'");
    const double weight = a.contains("weight") ? detail::number(a["weight"], w + ".weight") : 1.0;
    atoms.push_back({point_from_json(a["location"], w + ".location"), weight});
  }
  return PointMeasure(std::move(atoms));
}

inline json to_json(const EstimateRecord& r) {
  return {{"generator", r.generator},
          {"alpha", r.alpha},
          {"order_j", r.order_j},
          {"set_id", r.set_id},
          {"t", r.t},
          {"N", r.n},
          {"estimate", r.estimate},
          {"std_error", r.std_error},
          {"oracle", r.oracle},
          {"rel_error", std::isnan(r.rel_error) ? json(nullptr) : json(r.rel_error)},
          {"unstable_flag", r.unstable}};
}

}  // namespace hrv::io

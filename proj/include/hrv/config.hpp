#pragma once

// Run configuration for the command-line front end.
//
// TOML is the primary format and JSON is accepted; both are normalised to a
// JSON document and validated in one pass that records every violation before
// failing.

#include <cstdint>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>
#include <tomlplusplus/toml.hpp>

#include "hrv/errors.hpp"
#include "hrv/harness.hpp"
#include "hrv/io.hpp"
#include "hrv/measures.hpp"
#include "hrv/oracles.hpp"
#include "hrv/spaces.hpp"

namespace hrv::config {

using json = nlohmann::json;

/// Config rejection carrying every violation found.
class ConfigErrors : public ConfigError {
 public:
  explicit ConfigErrors(std::vector<std::string> problems)
      : ConfigError(join(problems)), problems_(std::move(problems)) {}
  const std::vector<std::string>& problems() const noexcept { return problems_; }

 private:
  static std::string join(const std::vector<std::string>& p) {
    std::string s;
    for (const auto& x : p) s += (s.empty() ? "" : "; ") + x;
    return s;
  }
  std::vector<std::string> problems_;
};

enum class Mode { Estimate, Sweep, Bracket, Metric, TransformDemo };

inline const char* mode_name(Mode m) {
  switch (m) {
    case Mode::Estimate: return "estimate";
    case Mode::Sweep: return "sweep";
    case Mode::Bracket: return "bracket";
    case Mode::Metric: return "metric";
    case Mode::TransformDemo: return "transform-demo";
  }
  return "?";
}

struct RunConfig {
  Mode mode = Mode::Sweep;
  ExperimentSpec spec;
  double delta = 0.0;         // bracket half-width
  std::string output;         // empty: standard output
  json metric;                // metric mode table
  json transform;             // transform-demo table
};

// ---------------------------------------------------------------------------
// Parsing

namespace detail {

inline json toml_to_json(const toml::node& node) {
  if (const auto* t = node.as_table()) {
    json o = json::object();
    for (const auto& [k, v] : *t) o[std::string(k.str())] = toml_to_json(v);
    return o;
  }
  if (const auto* a = node.as_array()) {
    json arr = json::array();
    for (const auto& v : *a) arr.push_back(toml_to_json(v));
    return arr;
  }
  if (const auto* v = node.as_integer()) return json(v->get());
  if (const auto* v = node.as_floating_point()) return json(v->get());
  if (const auto* v = node.as_boolean()) return json(v->get());
  if (const auto* v = node.as_string()) return json(v->get());
  // Dates and times have no meaning in a run config; keep them as text so the
  // validator can name the offending key.
  if (const auto* v = node.as_date()) {
    std::ostringstream os;
    os << *v;
    return json(os.str());
  }
  if (const auto* v = node.as_time()) {
    std::ostringstream os;
    os << *v;
    return json(os.str());
  }
  if (const auto* v = node.as_date_time()) {
    std::ostringstream os;
    os << *v;
    return json(os.str());
  }
  return json(nullptr);
}

inline bool looks_like_json(const std::string& path, const std::string& text) {
  if (path.size() >= 5 && path.compare(path.size() - 5, 5, ".json") == 0) return true;
  const auto first = text.find_first_not_of(" \t\r\n");
  return first != std::string::npos && text[first] == '{';
}

}  // namespace detail

/// Parses TOML or JSON text into a JSON document; ConfigError on syntax errors.
inline json parse_text(const std::string& text, const std::string& source = "config") {
  if (detail::looks_like_json(source, text)) {
    try {
      return json::parse(text);
    } catch (const json::parse_error& e) {
      throw ConfigErrors({source + ": invalid JSON: " + e.what()});
    }
  }
  try {
    return detail::toml_to_json(toml::parse(text, source));
  } catch (const toml::parse_error& e) {
    std::ostringstream os;
    os << source << ":" << e.source().begin.line << ":" << e.source().begin.column
       << ": invalid TOML: " << e.description();
    throw ConfigErrors({os.str()});
  }
}

inline json load_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigErrors({"cannot read config file '" + path + "'"});
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_text(ss.str(), path);
}

// ---------------------------------------------------------------------------
// Validation

namespace detail {

class Validator {
 public:
  std::vector<std::string> problems;

  void fail(const std::string& where, const std::string& what) { problems.push_back(where + ": " + what); }

  void keys(const json& obj, const std::string& where, const std::set<std::string>& allowed) {
    for (const auto& [k, _] : obj.items())
      if (!allowed.count(k)) fail(where.empty() ? k : where + "." + k, "unknown key");
  }

  std::optional<double> number(const json& obj, const std::string& key, const std::string& where,
                               bool required) {
    if (!obj.contains(key)) {
      if (required) fail(path(where, key), "missing");
      return std::nullopt;
    }
    const auto& v = obj.at(key);
    if (!v.is_number()) {
      fail(path(where, key), "expected a number");
      return std::nullopt;
    }
    const double d = v.get<double>();
    if (!std::isfinite(d)) {
      fail(path(where, key), "must be finite");
      return std::nullopt;
    }
    return d;
  }

  std::optional<std::uint64_t> count(const json& obj, const std::string& key,
                                     const std::string& where, bool required) {
    if (!obj.contains(key)) {
      if (required) fail(path(where, key), "missing");
      return std::nullopt;
    }
    const auto& v = obj.at(key);
    if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() && v.get<long long>() < 0)) {
      fail(path(where, key), "expected a nonnegative integer");
      return std::nullopt;
    }
    return v.get<std::uint64_t>();
  }

  std::optional<std::string> string(const json& obj, const std::string& key,
                                    const std::string& where, bool required) {
    if (!obj.contains(key)) {
      if (required) fail(path(where, key), "missing");
      return std::nullopt;
    }
    if (!obj.at(key).is_string()) {
      fail(path(where, key), "expected a string");
      return std::nullopt;
    }
    return obj.at(key).get<std::string>();
  }

  std::optional<std::vector<double>> numbers(const json& obj, const std::string& key,
                                             const std::string& where, bool required) {
    if (!obj.contains(key)) {
      if (required) fail(path(where, key), "missing");
      return std::nullopt;
    }
    const auto& v = obj.at(key);
    if (!v.is_array()) {
      fail(path(where, key), "expected an array of numbers");
      return std::nullopt;
    }
    std::vector<double> out;
    for (const auto& e : v) {
      if (!e.is_number() || !std::isfinite(e.get<double>())) {
        fail(path(where, key), "expected an array of finite numbers");
        return std::nullopt;
      }
      out.push_back(e.get<double>());
    }
    return out;
  }

  std::optional<bool> boolean(const json& obj, const std::string& key, const std::string& where) {
    if (!obj.contains(key)) return std::nullopt;
    if (!obj.at(key).is_boolean()) {
      fail(path(where, key), "expected true or false");
      return std::nullopt;
    }
    return obj.at(key).get<bool>();
  }

  static std::string path(const std::string& where, const std::string& key) {
    return where.empty() ? key : where + "." + key;
  }
};

inline std::optional<Generator> parse_generator(const std::string& s) {
  if (s == "IidVector" || s == "iid_vector") return Generator::IidVector;
  if (s == "PoissonPoints" || s == "poisson_points") return Generator::PoissonPoints;
  if (s == "CompoundPoisson" || s == "compound_poisson") return Generator::CompoundPoisson;
  if (s == "LevyPath" || s == "levy_path") return Generator::LevyPath;
  return std::nullopt;
}

inline std::optional<Mode> parse_mode(const std::string& s) {
  if (s == "estimate") return Mode::Estimate;
  if (s == "sweep") return Mode::Sweep;
  if (s == "bracket") return Mode::Bracket;
  if (s == "metric") return Mode::Metric;
  if (s == "transform-demo") return Mode::TransformDemo;
  return std::nullopt;
}

inline std::optional<TestSet> parse_set(Validator& v, const json& s, const std::string& where) {
  if (!s.is_object()) {
    v.fail(where, "expected a table");
    return std::nullopt;
  }
  v.keys(s, where, {"id", "family", "indices", "thresholds", "p", "x", "rho"});
  const auto id = v.string(s, "id", where, true);
  const auto family = v.string(s, "family", where, true);
  if (!id || !family) return std::nullopt;
  try {
    if (*family == "IidRect") {
      const auto a = v.numbers(s, "thresholds", where, true);
      const auto idx = v.numbers(s, "indices", where, true);
      if (!a || !idx) return std::nullopt;
      std::vector<std::size_t> indices;
      for (const double d : *idx) {
        if (d < 1 || d != std::floor(d)) {
          v.fail(where + ".indices", "expected positive integers");
          return std::nullopt;
        }
        indices.push_back(static_cast<std::size_t>(d));
      }
      return TestSet::iid_rect(*id, indices, *a);
    }
    if (*family == "OrderedRect") {
      const auto a = v.numbers(s, "thresholds", where, true);
      if (!a) return std::nullopt;
      return TestSet::ordered_rect(*id, *a);
    }
    if (*family == "SumTail") {
      const auto p = v.count(s, "p", where, true);
      const auto x = v.number(s, "x", where, true);
      if (!p || !x) return std::nullopt;
      return TestSet::sum_tail(*id, static_cast<std::size_t>(*p), *x);
    }
    if (*family == "JumpSet") {
      const auto a = v.numbers(s, "thresholds", where, true);
      const auto rho = v.number(s, "rho", where, false);
      if (!a) return std::nullopt;
      return TestSet::jump_set(*id, *a, rho.value_or(0.0));
    }
    v.fail(where + ".family", "unknown family '" + *family +
                                  "' (IidRect, OrderedRect, SumTail, JumpSet)");
  } catch (const std::exception& e) {
    v.fail(where, e.what());
  }
  return std::nullopt;
}

inline std::optional<ConeSpec> parse_cone(Validator& v, const json& c, const std::string& where) {
  if (c.is_string()) {
    const auto s = c.get<std::string>();
    if (s == "Origin") return ConeSpec::origin();
    if (s == "HalfPlaneFloor") return ConeSpec::half_plane_floor();
    v.fail(where, "cone '" + s + "' needs a parameter; use {kind = ..., param = ...}");
    return std::nullopt;
  }
  if (!c.is_object()) {
    v.fail(where, "expected a cone name or {kind, param}");
    return std::nullopt;
  }
  v.keys(c, where, {"kind", "param"});
  const auto kind = v.string(c, "kind", where, true);
  const auto param = v.count(c, "param", where, false);
  if (!kind) return std::nullopt;
  try {
    if (*kind == "Origin") return ConeSpec::origin();
    if (*kind == "HalfPlaneFloor") return ConeSpec::half_plane_floor();
    if (!param) {
      v.fail(where + ".param", "missing");
      return std::nullopt;
    }
    const auto p = static_cast<std::size_t>(*param);
    if (*kind == "Axes") return ConeSpec::axes(p);
    if (*kind == "AtMostJPositive") return ConeSpec::at_most_j_positive(p);
    if (*kind == "SeqAtMostJPositive") return ConeSpec::seq_at_most_j_positive(p);
    if (*kind == "StepAtMostJJumps") return ConeSpec::step_at_most_j_jumps(p);
    v.fail(where + ".kind", "unknown cone '" + *kind + "'");
  } catch (const std::exception& e) {
    v.fail(where, e.what());
  }
  return std::nullopt;
}

inline std::optional<GroundMetric> parse_ground(const std::string& s) {
  if (s == "l1") return GroundMetric::L1;
  if (s == "euclidean") return GroundMetric::Euclidean;
  if (s == "d_inf") return GroundMetric::DInf;
  if (s == "d_inf_prime") return GroundMetric::DInfPrime;
  if (s == "skorohod") return GroundMetric::Skorohod;
  return std::nullopt;
}

inline void check_metric_table(Validator& v, const json& m) {
  const std::string w = "metric";
  if (!m.is_object()) {
    v.fail(w, "expected a table");
    return;
  }
  v.keys(m, w, {"kind", "mu", "nu", "ground", "cone", "tol", "atom_cap", "n_probe", "r_min",
                "r_max", "points", "use_bounded_lipschitz"});
  const auto kind = v.string(m, "kind", w, true);
  if (kind && *kind != "prohorov" && *kind != "bounded_lipschitz" && *kind != "m0")
    v.fail(w + ".kind", "expected prohorov, bounded_lipschitz or m0");
  for (const char* key : {"mu", "nu"}) {
    if (!m.contains(key)) {
      v.fail(w + "." + key, "missing");
      continue;
    }
    try {
      io::measure_from_json(m.at(key), w + "." + key);
    } catch (const std::exception& e) {
      v.fail(w + "." + key, e.what());
    }
  }
  if (const auto g = v.string(m, "ground", w, false); g && !parse_ground(*g))
    v.fail(w + ".ground", "expected l1, euclidean, d_inf, d_inf_prime or skorohod");
  if (kind && *kind == "m0") {
    if (!m.contains("cone")) v.fail(w + ".cone", "missing (required for m0)");
    else parse_cone(v, m.at("cone"), w + ".cone");
  } else if (m.contains("cone")) {
    parse_cone(v, m.at("cone"), w + ".cone");
  }
  if (const auto tol = v.number(m, "tol", w, false); tol && !(*tol > 0.0)) v.fail(w + ".tol", "must be > 0");
  v.count(m, "atom_cap", w, false);
  v.count(m, "n_probe", w, false);
  v.count(m, "points", w, false);
  v.number(m, "r_min", w, false);
  v.number(m, "r_max", w, false);
  v.boolean(m, "use_bounded_lipschitz", w);
}

inline void check_transform_table(Validator& v, const json& t) {
  const std::string w = "transform";
  if (!t.is_object()) {
    v.fail(w, "expected a table");
    return;
  }
  v.keys(t, w, {"op", "x", "p", "cone", "radius", "angle", "times", "m", "action", "lambda"});
  const auto op = v.string(t, "op", w, true);
  static const std::set<std::string> ops{"cumsum", "proj",       "polar", "polar_inv", "gpolar",
                                         "gpolar_inv", "t_m", "scale"};
  if (op && !ops.count(*op))
    v.fail(w + ".op", "expected one of cumsum, proj, polar, polar_inv, gpolar, gpolar_inv, t_m, scale");
}

}  // namespace detail

/// Builds a RunConfig from a parsed document. Throws ConfigErrors listing
/// every problem found.
inline RunConfig from_json(const json& doc) {
  detail::Validator v;
  RunConfig rc;
  if (!doc.is_object()) throw ConfigErrors({"config: top level must be a table"});
  v.keys(doc, "", {"mode", "generator", "alpha", "order_j", "scaling_root", "t_grid",
                   "replications", "master_seed", "workers", "output", "delta", "levy", "sets",
                   "metric", "transform"});

  if (const auto m = v.string(doc, "mode", "", true)) {
    if (const auto mode = detail::parse_mode(*m)) rc.mode = *mode;
    else v.fail("mode", "expected estimate, sweep, bracket, metric or transform-demo");
  }
  const bool experiment = rc.mode == Mode::Estimate || rc.mode == Mode::Sweep ||
                          rc.mode == Mode::Bracket;

  auto& spec = rc.spec;
  if (const auto g = v.string(doc, "generator", "", experiment)) {
    if (const auto gen = detail::parse_generator(*g)) spec.generator = *gen;
    else v.fail("generator", "expected IidVector, PoissonPoints, CompoundPoisson or LevyPath");
  }
  if (const auto a = v.number(doc, "alpha", "", experiment)) {
    if (*a > 0.0) spec.alpha = *a;
    else v.fail("alpha", "must be > 0");
  }
  if (const auto j = v.count(doc, "order_j", "", experiment)) spec.order_j = static_cast<std::size_t>(*j);
  if (const auto root = v.count(doc, "scaling_root", "", false)) {
    const auto expected = scaling_root(spec.generator, spec.order_j);
    if (*root != expected)
      v.fail("scaling_root", "is " + std::to_string(*root) + " but " +
                                 generator_name(spec.generator) + " at order_j=" +
                                 std::to_string(spec.order_j) + " scales by b(t^(1/" +
                                 std::to_string(expected) + "))");
  }
  if (experiment && spec.generator != Generator::IidVector && doc.contains("order_j") &&
      spec.order_j == 0)
    v.fail("order_j", std::string("must be >= 1 for ") + generator_name(spec.generator));

  if (const auto tg = v.numbers(doc, "t_grid", "", experiment)) {
    if (tg->empty()) v.fail("t_grid", "must not be empty");
    for (std::size_t i = 0; i < tg->size(); ++i) {
      if (!((*tg)[i] > 0.0)) v.fail("t_grid[" + std::to_string(i) + "]", "must be > 0");
      if (i > 0 && !((*tg)[i] > (*tg)[i - 1])) v.fail("t_grid", "must be strictly increasing");
    }
    if (rc.mode == Mode::Estimate && tg->size() > 1)
      v.fail("t_grid", "estimate mode takes exactly one t; use mode = \"sweep\" for several");
    spec.t_grid = *tg;
  }
  if (const auto n = v.count(doc, "replications", "", experiment)) {
    if (*n == 0) v.fail("replications", "must be >= 1");
    spec.replications = *n;
  }
  if (const auto s = v.count(doc, "master_seed", "", false)) spec.master_seed = *s;
  if (const auto w = v.count(doc, "workers", "", false)) spec.workers = static_cast<unsigned>(*w);
  if (const auto o = v.string(doc, "output", "", false)) rc.output = *o;
  if (const auto d = v.number(doc, "delta", "", rc.mode == Mode::Bracket)) {
    if (!(*d >= 0.0)) v.fail("delta", "must be >= 0");
    rc.delta = *d;
  }

  if (doc.contains("levy")) {
    const auto& l = doc.at("levy");
    if (!l.is_object()) {
      v.fail("levy", "expected a table");
    } else {
      v.keys(l, "levy", {"small_jump_cutoff", "include_brownian", "sigma", "drift", "grid"});
      if (const auto e = v.number(l, "small_jump_cutoff", "levy", false)) {
        if (!(*e > 0.0 && *e <= 1.0)) v.fail("levy.small_jump_cutoff", "must lie in (0, 1]");
        spec.levy.small_jump_cutoff = *e;
      }
      if (const auto b = v.boolean(l, "include_brownian", "levy")) spec.levy.include_brownian = *b;
      if (const auto s = v.number(l, "sigma", "levy", false)) {
        if (*s < 0.0) v.fail("levy.sigma", "must be >= 0");
        spec.levy.sigma = *s;
      }
      if (const auto a = v.number(l, "drift", "levy", false)) spec.levy.drift = *a;
      if (const auto g = v.count(l, "grid", "levy", false)) {
        if (*g < 2) v.fail("levy.grid", "must be >= 2");
        spec.levy_grid = static_cast<std::size_t>(*g);
      }
    }
  }

  if (doc.contains("sets")) {
    const auto& sets = doc.at("sets");
    if (!sets.is_array()) {
      v.fail("sets", "expected an array of tables");
    } else {
      if (sets.empty() && experiment) v.fail("sets", "must not be empty");
      std::set<std::string> ids;
      for (std::size_t i = 0; i < sets.size(); ++i) {
        const std::string where = "sets[" + std::to_string(i) + "]";
        auto s = detail::parse_set(v, sets[i], where);
        if (!s) continue;
        if (!ids.insert(s->id()).second) v.fail(where + ".id", "duplicate id '" + s->id() + "'");
        if (experiment) {
          if (!hrv::detail::compatible(spec.generator, *s)) {
            v.fail(where + ".family", s->family_name() + " cannot be used with generator " +
                                          generator_name(spec.generator));
          } else if (spec.generator != Generator::IidVector && s->order() != spec.order_j) {
            v.fail(where + ".thresholds", "needs exactly order_j = " + std::to_string(spec.order_j) +
                                              " entries");
          } else {
            try {
              evaluate(limit_measure_for(spec.generator, spec.order_j, spec.alpha), *s);
            } catch (const std::exception& e) {
              v.fail(where, e.what());
            }
          }
          if (rc.mode == Mode::Bracket && rc.delta >= s->clearance())
            v.fail("delta", "must be smaller than the clearance of set '" + s->id() + "'");
        }
        spec.test_sets.push_back(std::move(*s));
      }
    }
  } else if (experiment) {
    v.fail("sets", "missing");
  }

  if (rc.mode == Mode::Metric) {
    if (!doc.contains("metric")) v.fail("metric", "missing (required for mode metric)");
    else detail::check_metric_table(v, doc.at("metric"));
    if (doc.contains("metric")) rc.metric = doc.at("metric");
  } else if (doc.contains("metric")) {
    detail::check_metric_table(v, doc.at("metric"));
  }
  if (rc.mode == Mode::TransformDemo) {
    if (!doc.contains("transform")) v.fail("transform", "missing (required for mode transform-demo)");
    else detail::check_transform_table(v, doc.at("transform"));
    if (doc.contains("transform")) rc.transform = doc.at("transform");
  } else if (doc.contains("transform")) {
    detail::check_transform_table(v, doc.at("transform"));
  }

  if (!v.problems.empty()) throw ConfigErrors(std::move(v.problems));
  return rc;
}

inline RunConfig load(const std::string& path) { return from_json(load_file(path)); }

}  // namespace hrv::config

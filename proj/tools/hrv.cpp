// hrv: run hidden regular variation experiments and metric computations.
//
//   hrv run <config> [--out PATH] [--workers N] [--seed S]
//   hrv selfcheck

#include <cerrno>
#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "hrv/config.hpp"
#include "hrv/runner.hpp"
#include "hrv/selfcheck.hpp"

namespace {

int cmd_run(const std::string& path, hrv::RunOverrides overrides) {
  try {
    auto rc = hrv::config::load(path);
    if (!overrides.seed) {
      if (const char* env = std::getenv("HRV_SEED"); env != nullptr && *env != '\0') {
        char* end = nullptr;
        errno = 0;
        const unsigned long long s = std::strtoull(env, &end, 10);
        if (errno != 0 || *end != '\0' || *env == '-') {
          std::cerr << "config error: HRV_SEED: expected a nonnegative integer, got '" << env << "'\n";
          return hrv::exit_code::kConfig;
        }
        overrides.seed = s;
      }
    }
    hrv::apply_overrides(rc, overrides);
    std::ostream& summary = rc.output.empty() || rc.output == "-" ? std::cerr : std::cout;
    hrv::execute(rc, summary);
    return hrv::exit_code::kOk;
  } catch (const hrv::config::ConfigErrors& e) {
    std::cerr << "config error: " << e.problems().size() << " problem(s) in " << path << '\n';
    for (const auto& p : e.problems()) std::cerr << "  " << p << '\n';
    return hrv::exit_code::kConfig;
  } catch (const std::exception& e) {
    const int code = hrv::exit_code_for(e);
    std::cerr << (code == hrv::exit_code::kConfig ? "config error: " : "numeric failure: ")
              << e.what() << '\n';
    return code;
  }
}

int cmd_selfcheck(bool corrupt) {
  hrv::SelfcheckOptions opts;
  if (corrupt) opts.oracle = hrv::corrupted_oracle;
  const auto report = hrv::run_selfcheck(opts);
  for (const auto& c : report.checks) {
    std::cout << (c.passed ? "PASS " : "FAIL ") << c.name << " (" << c.cases << " cases)";
    if (!c.passed) std::cout << ": " << c.detail;
    std::cout << '\n';
  }
  if (const auto* f = report.first_failure()) {
    std::cerr << "selfcheck failed: " << f->name << '\n';
    return hrv::exit_code::kNumeric;
  }
  std::cout << "selfcheck ok\n";
  return hrv::exit_code::kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Monte Carlo and metric toolkit for hidden regular variation"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "Execute a TOML or JSON run configuration");
  std::string config_path;
  std::string out;
  unsigned workers = 0;
  std::uint64_t seed = 0;
  run->add_option("config", config_path, "Config file (TOML, or JSON)")->required();
  auto* out_opt = run->add_option("--out", out, "Output path (overrides the config)");
  auto* workers_opt = run->add_option("--workers", workers, "Worker threads (0: all cores)");
  auto* seed_opt = run->add_option("--seed", seed, "Master seed (overrides HRV_SEED and the config)");

  auto* check = app.add_subcommand("selfcheck", "Run the invariant battery");
  bool corrupt = false;
  check->add_flag("--corrupt-oracle", corrupt, "Inject a broken oracle (testing aid)")
      ->group("");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : hrv::exit_code::kConfig;
  }

  if (run->parsed()) {
    hrv::RunOverrides o;
    if (*out_opt) o.output = out;
    if (*workers_opt) o.workers = workers;
    if (*seed_opt) o.seed = seed;
    return cmd_run(config_path, o);
  }
  return cmd_selfcheck(corrupt);
}

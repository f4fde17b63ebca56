#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "mtlbal/config.hpp"
#include "mtlbal/errors.hpp"
#include "mtlbal/experiment.hpp"
#include "mtlbal/verify.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitVerifyFailed = 1;
constexpr int kExitConfigError = 2;
constexpr int kExitDivergence = 3;

int print_checks(const std::vector<mtlbal::CheckResult>& results, bool quiet) {
  std::size_t failed = 0;
  for (const mtlbal::CheckResult& r : results) {
    if (!r.pass) ++failed;
    if (quiet && r.pass) continue;
    std::cout << (r.pass ? "PASS" : "FAIL") << "  " << r.name;
    if (!r.detail.empty()) std::cout << "  (" << r.detail << ")";
    std::cout << '\n';
  }
  std::cout << (results.size() - failed) << "/" << results.size()
            << " checks passed\n";
  return failed == 0 ? kExitOk : kExitVerifyFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-task gradient balancing toolkit"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::string> out_dir;
  std::optional<std::uint64_t> seed;
  bool quiet = false;

  const auto add_run_options = [&](CLI::App* cmd) {
    cmd->add_option("config", config_path, "Path to a JSON experiment config")
        ->required();
    cmd->add_option("--out", out_dir, "Output directory (overrides the config)");
    cmd->add_option("--seed", seed, "Single seed (overrides the config's list)");
    cmd->add_flag("--quiet", quiet, "Suppress progress output");
  };

  CLI::App* run_cmd =
      app.add_subcommand("run", "Execute one configuration over its seeds");
  add_run_options(run_cmd);

  CLI::App* sweep_cmd = app.add_subcommand(
      "sweep", "Execute every sweep-axis combination (axes required)");
  add_run_options(sweep_cmd);

  CLI::App* verify_cmd =
      app.add_subcommand("verify", "Run a built-in verification suite");
  std::string which;
  std::string fixtures_dir = "data/tables";
  verify_cmd->add_option("suite", which, "One of: prop1, prop2, tables")
      ->required()
      ->check(CLI::IsMember({"prop1", "prop2", "tables"}));
  verify_cmd->add_option("--fixtures", fixtures_dir,
                         "Directory with published-table fixtures");
  verify_cmd->add_flag("--quiet", quiet, "Print failures and the tally only");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfigError;
  }

  try {
    if (run_cmd->parsed() || sweep_cmd->parsed()) {
      const mtlbal::ExperimentConfig config =
          mtlbal::parse_config_file(config_path);
      if (run_cmd->parsed() && !config.sweep.empty()) {
        throw mtlbal::ConfigError(
            "sweep", "config declares sweep axes; use the sweep subcommand");
      }
      if (sweep_cmd->parsed() && config.sweep.empty()) {
        throw mtlbal::ConfigError(
            "sweep", "sweep requires at least one sweep axis in the config");
      }
      mtlbal::RunOptions options;
      options.out_override = out_dir;
      options.seed_override = seed;
      options.quiet = quiet;
      return mtlbal::run_experiment(config, options) == 0 ? kExitOk
                                                          : kExitDivergence;
    }

    std::vector<mtlbal::CheckResult> results;
    if (which == "prop1") {
      results = mtlbal::verify_prop1();
    } else if (which == "prop2") {
      results = mtlbal::verify_prop2();
    } else {
      results = mtlbal::verify_tables(fixtures_dir);
    }
    return print_checks(results, quiet);
  } catch (const mtlbal::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const mtlbal::DivergenceError& e) {
    std::cerr << "divergence: " << e.what() << '\n';
    return kExitDivergence;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfigError;
  }
}

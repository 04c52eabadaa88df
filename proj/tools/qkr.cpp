// Command-line front end: run experiment configs, reproduce bundled figure
// recipes, validate configs, and run the dense-operator equivalence suite.

#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "qkr/config.hpp"
#include "qkr/oracle.hpp"
#include "qkr/recipes.hpp"
#include "qkr/runner.hpp"

int main(int argc, char** argv) {
  CLI::App app{"quantum kicked rotator simulator with coherent gate errors"};
  app.require_subcommand(1);

  int workers = 0;  // 0: QKR_WORKERS env var or hardware concurrency

  auto* cmd_run = app.add_subcommand("run", "run an experiment config (JSON)");
  std::string run_config;
  cmd_run->add_option("config", run_config, "path to config file")->required();
  cmd_run->add_option("--workers", workers, "worker thread count");

  auto* cmd_repro = app.add_subcommand("reproduce", "run a bundled figure recipe");
  std::string figure_id;
  std::string out_root = "out";
  std::vector<std::string> overrides;
  cmd_repro->add_option("figure", figure_id, "fig1 .. fig13")->required();
  cmd_repro->add_option("--override", overrides,
                        "key=value applied to every config of the recipe");
  cmd_repro->add_option("--out", out_root, "output root directory");
  cmd_repro->add_option("--workers", workers, "worker thread count");

  auto* cmd_validate = app.add_subcommand("validate", "parse and resolve a config");
  std::string validate_config;
  cmd_validate->add_option("config", validate_config, "path to config file")->required();

  auto* cmd_oracle = app.add_subcommand(
      "oracle-check", "gate circuits vs dense operators at small qubit counts");
  int max_nq = 6;
  int steps = 100;
  cmd_oracle->add_option("--max-nq", max_nq, "largest qubit count (default 6)");
  cmd_oracle->add_option("--steps", steps, "iterated map steps (default 100)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*cmd_run) {
      const auto config = qkr::ExperimentConfig::from_json_file(run_config);
      qkr::RunnerOptions opts;
      opts.workers = workers;
      const auto summary = qkr::run(config, opts);
      std::printf("%s: %d task(s) run, %d skipped%s\n",
                  summary.experiment_dir.string().c_str(), summary.tasks_run,
                  summary.tasks_skipped, summary.complete ? "" : " (interrupted)");
      return summary.complete ? 0 : 3;
    }
    if (*cmd_repro) {
      qkr::RunnerOptions opts;
      opts.workers = workers;
      const auto result = qkr::reproduce(figure_id, overrides, out_root, opts);
      std::printf("%s: %zu experiment(s) under %s\n", figure_id.c_str(),
                  result.experiment_dirs.size(), result.figure_dir.string().c_str());
      return result.complete ? 0 : 3;
    }
    if (*cmd_validate) {
      const auto config = qkr::ExperimentConfig::from_json_file(validate_config);
      const auto points = config.resolve();
      config.check_memory(qkr::resolve_workers({}));
      std::printf("ok: %zu parameter point(s)\n%s\n", points.size(),
                  config.to_json().c_str());
      return 0;
    }
    if (*cmd_oracle) {
      const auto results = qkr::oracle::equivalence_suite(max_nq, steps, 20021021);
      bool all_ok = true;
      for (const auto& r : results) {
        std::printf("[%s] %s: worst %.3g (tolerance %.3g)\n", r.passed ? "PASS" : "FAIL",
                    r.name.c_str(), r.worst, r.tolerance);
        all_ok = all_ok && r.passed;
      }
      return all_ok ? 0 : 1;
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}

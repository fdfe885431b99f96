// Copyright (c) 2026 The localzo authors
// SPDX-License-Identifier: Apache-2.0
//
// Command-line entry point: train / thresholds / curves / verify.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "localzo/harness.hpp"
#include "localzo/verify.hpp"

int main(int argc, char** argv) {
  CLI::App app{"local zeroth-order spiking-network training toolkit"};
  app.require_subcommand(1);

  // train
  std::string config_path;
  std::string baseline_dir;
  auto* train = app.add_subcommand(
      "train", "run one training experiment from a JSON config");
  train->add_option("-c,--config", config_path, "config JSON path")
      ->required()
      ->check(CLI::ExistingFile);
  train->add_option("--baseline", baseline_dir,
                    "finished run directory to compute speedups against");

  // thresholds
  std::int64_t mc_trials = 1'000'000;
  std::uint64_t seed = 1;
  auto* thresholds = app.add_subcommand(
      "thresholds",
      "print the expected back-propagation threshold table as CSV");
  thresholds->add_option("--mc-trials", mc_trials, "Monte-Carlo trials");
  thresholds->add_option("--seed", seed, "random seed");

  // curves
  std::string kind = "normal";
  double temperature = 0.0;
  std::vector<double> deltas{0.05, 0.5, 1.0};
  double u_min = -2.0, u_max = 2.0;
  int points = 81;
  std::int64_t mc_draws = 100'000;
  auto* curves = app.add_subcommand(
      "curves", "emit (u, value, mc) curves for an expected surrogate");
  curves->add_option("--kind", kind,
                     "normal|uniform|laplace|sigmoid|fastsigmoid");
  curves->add_option("--k", temperature, "temperature for sigmoid kinds");
  curves->add_option("--deltas", deltas, "delta values");
  curves->add_option("--umin", u_min, "grid start");
  curves->add_option("--umax", u_max, "grid end");
  curves->add_option("--points", points, "grid points");
  curves->add_option("--mc-draws", mc_draws, "Monte-Carlo draws per delta");
  curves->add_option("--seed", seed, "random seed");

  // verify
  std::string level = "quick";
  auto* verify =
      app.add_subcommand("verify", "run the module invariant suites");
  verify->add_option("--level", level, "quick|full")
      ->check(CLI::IsMember({"quick", "full"}));
  verify->add_option("--seed", seed, "random seed");

  CLI11_PARSE(app, argc, argv);

  try {
    if (train->parsed()) {
      const lzo::ExperimentConfig cfg = lzo::load_config(config_path);
      const std::optional<std::string> baseline =
          baseline_dir.empty() ? std::nullopt
                               : std::optional<std::string>(baseline_dir);
      const lzo::RunResult res = lzo::run_train(cfg, baseline, std::cout);
      std::cout << "final train_acc=" << res.final_train_acc
                << " test_acc=" << res.final_test_acc << "\n";
      return res.exit_code;
    }
    if (thresholds->parsed()) {
      lzo::write_thresholds_csv(std::cout, mc_trials, seed);
      return 0;
    }
    if (curves->parsed()) {
      lzo::write_curves_csv(std::cout, kind, temperature, deltas, u_min, u_max,
                            points, mc_draws, seed);
      return 0;
    }
    if (verify->parsed()) {
      const auto lvl = level == "full" ? lzo::VerifyLevel::kFull
                                       : lzo::VerifyLevel::kQuick;
      return lzo::print_verification(std::cout, lvl, seed) == 0 ? 0 : 1;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}

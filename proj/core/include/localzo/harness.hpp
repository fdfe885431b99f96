// Copyright (c) 2026 The localzo authors
// SPDX-License-Identifier: Apache-2.0
//
// Experiment configuration, training-loop orchestration, and machine-readable
// result emission (metrics.csv / summary.json / checkpoint).

#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "localzo/data.hpp"
#include "localzo/snn.hpp"

namespace lzo {

struct DataSpec {
  bool synthetic = true;
  SynthTaskSpec synth;
  int n_train = 2048;
  int n_test = 512;
  std::string train_events;  // used when !synthetic
  std::string test_events;
};

struct ExperimentConfig {
  std::string mode;             // surrogate | sparsegrad | localzo
  std::string distribution;     // normal | uniform | laplace (XOR surrogate_kind)
  std::string surrogate_kind;   // sigmoid | fastsigmoid
  double delta = 0.05;
  int alpha = 0;                // 0 = default for the chosen family
  int m = 1;
  double k = 0.0;               // temperature; defaults per kind
  std::optional<double> b_th;   // sparsegrad; auto-filled when absent
  std::vector<int> dims{100, 200, 200, 10};
  LifConfig lif;
  double lr = 1e-3;
  int epochs = 20;
  int batch = 128;
  double init_gain = 3.0;
  DataSpec data;
  std::uint64_t seed = 1;
  std::string outdir;

  void validate() const;  // throws ConfigError
};

// Parses a JSON config document; unknown keys are rejected. When `outdir` is
// absent, falls back to the LZO_OUT_DIR environment variable.
ExperimentConfig parse_config_json(const std::string& json_text);
ExperimentConfig load_config(const std::string& path);

// Materializes the backward mode from the config (derives tabulated samplers
// and auto-fills the sparsegrad threshold where needed).
BackwardMode resolve_mode(const ExperimentConfig& cfg);

struct RunResult {
  int exit_code = 0;
  double final_train_acc = 0.0;
  double final_test_acc = 0.0;
  double total_fwd_ms = 0.0;
  double total_bwd_ms = 0.0;
  std::int64_t total_mac_fwd = 0;
  std::int64_t total_mac_bwd = 0;
  std::vector<double> mean_active_pct;
  std::uint64_t data_digest = 0;
  std::uint64_t metrics_digest = 0;
  long updates = 0;
};

// Runs training per the config; writes metrics.csv, summary.json and a
// checkpoint under cfg.outdir. `baseline_dir` points at a finished run with
// identical seed/network/data to compute speedups against.
RunResult run_train(const ExperimentConfig& cfg,
                    const std::optional<std::string>& baseline_dir,
                    std::ostream& log);

// Threshold table (quadrature and Monte-Carlo columns) as CSV.
void write_thresholds_csv(std::ostream& os, std::int64_t mc_trials,
                          std::uint64_t seed);

// (u, value, mc) curves for an expected surrogate or a derived one.
void write_curves_csv(std::ostream& os, const std::string& kind, double k,
                      const std::vector<double>& deltas, double u_min,
                      double u_max, int points, std::int64_t mc_draws,
                      std::uint64_t seed);

}  // namespace lzo

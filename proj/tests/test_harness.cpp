// Copyright (c) 2026 The localzo authors
// SPDX-License-Identifier: Apache-2.0

#include <filesystem>
#include <fstream>
#include <sstream>

#include <doctest.h>

#include "localzo/harness.hpp"
#include "localzo/thresholds.hpp"

namespace {

namespace fs = std::filesystem;

std::string tiny_config(const std::string& mode, const std::string& outdir,
                        int epochs, const std::string& extra = "") {
  std::ostringstream ss;
  ss << R"({
    "mode": ")" << mode << R"(",
    "distribution": "normal",
    "delta": 0.05,
    "m": 1,
    "dims": [20, 24, 24, 4],
    "epochs": )" << epochs << R"(,
    "batch": 16,
    "seed": 5,
    "data": {"synthetic": {"num_classes": 4, "d": 20, "T": 12,
                            "jitter_std": 1.0, "rate": 0.3,
                            "n_train": 64, "n_test": 32}},
    "outdir": ")" << outdir << R"(")" << extra << R"(
  })";
  return ss.str();
}

int count_lines(const std::string& path) {
  std::ifstream in(path);
  int n = 0;
  std::string line;
  while (std::getline(in, line)) ++n;
  return n;
}

TEST_CASE("config parsing and validation") {
  CHECK_THROWS_AS(lzo::parse_config_json("{not json"), lzo::ParseError);
  CHECK_THROWS_AS(lzo::parse_config_json(R"({"mode": "magic"})"),
                  lzo::ConfigError);
  CHECK_THROWS_AS(
      lzo::parse_config_json(
          R"({"mode": "localzo", "outdir": "x", "bogus_key": 1})"),
      lzo::ConfigError);

  // Ambiguous mode: both a sampling distribution and a surrogate kind.
  CHECK_THROWS_WITH_AS(
      lzo::parse_config_json(
          R"({"mode": "localzo", "distribution": "normal",
              "surrogate_kind": "sigmoid", "outdir": "x"})"),
      doctest::Contains("ambiguous"), lzo::ConfigError);

  const auto cfg = lzo::parse_config_json(
      R"({"mode": "localzo", "distribution": "uniform", "outdir": "x"})");
  CHECK(cfg.mode == "localzo");
  CHECK(cfg.delta == 0.05);
  CHECK(cfg.epochs == 20);
}

TEST_CASE("mode resolution") {
  lzo::ExperimentConfig cfg;
  cfg.mode = "sparsegrad";
  cfg.distribution = "normal";
  cfg.delta = 0.05;
  cfg.m = 1;
  cfg.outdir = "x";

  // Auto-filled gate equals the expected threshold of the paired local-ZO
  // configuration.
  const auto mode = lzo::resolve_mode(cfg);
  CHECK(mode.kind == lzo::BackwardKind::kSparseGrad);
  const double expect = lzo::expected_threshold(
      {lzo::Distribution::standard(lzo::DistKind::kNormal), 1, 0.05});
  CHECK(mode.b_th == doctest::Approx(expect).epsilon(1e-12));

  cfg.b_th = 0.123;
  CHECK(lzo::resolve_mode(cfg).b_th == doctest::Approx(0.123));

  lzo::ExperimentConfig zcfg;
  zcfg.mode = "localzo";
  zcfg.surrogate_kind = "sigmoid";
  zcfg.delta = 0.05;
  zcfg.outdir = "x";
  const auto zmode = lzo::resolve_mode(zcfg);
  CHECK(zmode.kind == lzo::BackwardKind::kLocalZO);
  CHECK(zmode.zo.alpha == 1);
  CHECK(zmode.zo.scale == doctest::Approx(1.0).epsilon(1e-3));
  CHECK(zmode.dist->kind() == lzo::DistKind::kTabulated);

  lzo::ExperimentConfig fcfg = zcfg;
  fcfg.surrogate_kind = "fastsigmoid";
  const auto fmode = lzo::resolve_mode(fcfg);
  CHECK(fmode.zo.alpha == -1);
  CHECK(fmode.zo.scale == doctest::Approx(0.02).epsilon(1e-6));
}

TEST_CASE("zero-epoch run writes header-only metrics and chance accuracy") {
  const auto outdir = (fs::temp_directory_path() / "lzo_run_e0").string();
  fs::remove_all(outdir);
  const auto cfg = lzo::parse_config_json(tiny_config("surrogate", outdir, 0));
  std::ostringstream log;
  const auto res = lzo::run_train(cfg, std::nullopt, log);
  CHECK(res.exit_code == 0);
  CHECK(res.updates == 0);
  CHECK(count_lines(outdir + "/metrics.csv") == 1);
  // Untrained 4-class accuracy stays near chance.
  CHECK(res.final_test_acc <= 0.6);
  CHECK(fs::exists(outdir + "/summary.json"));
  CHECK(fs::exists(outdir + "/checkpoint.lzonet"));
  fs::remove_all(outdir);
}

TEST_CASE("training runs write one metrics row per update and pair up") {
  const auto base_dir = (fs::temp_directory_path() / "lzo_run_base").string();
  const auto lzo_dir = (fs::temp_directory_path() / "lzo_run_lzo").string();
  fs::remove_all(base_dir);
  fs::remove_all(lzo_dir);

  std::ostringstream log;
  const auto base_cfg =
      lzo::parse_config_json(tiny_config("surrogate", base_dir, 2));
  const auto base_res = lzo::run_train(base_cfg, std::nullopt, log);
  CHECK(base_res.exit_code == 0);
  // 64 samples / batch 16 = 4 updates per epoch, 2 epochs.
  CHECK(base_res.updates == 8);
  CHECK(count_lines(base_dir + "/metrics.csv") == 9);

  const auto lzo_cfg = lzo::parse_config_json(tiny_config("localzo", lzo_dir, 2));
  const auto lzo_res = lzo::run_train(lzo_cfg, base_dir, log);
  CHECK(lzo_res.exit_code == 0);
  CHECK(lzo_res.data_digest == base_res.data_digest);

  std::ifstream sin(lzo_dir + "/summary.json");
  std::stringstream ss;
  ss << sin.rdbuf();
  const std::string summary = ss.str();
  CHECK(summary.find("backward_speedup") != std::string::npos);
  CHECK(summary.find("mac_backward_ratio") != std::string::npos);
  CHECK(summary.find("\"mac_backward_ratio\": null") == std::string::npos);

  // A mismatched baseline is rejected.
  auto other = lzo::parse_config_json(tiny_config("localzo", lzo_dir + "_b", 1));
  other.seed = 6;
  CHECK_THROWS_AS(lzo::run_train(other, base_dir, log), lzo::ConfigError);

  fs::remove_all(base_dir);
  fs::remove_all(lzo_dir);
  fs::remove_all(lzo_dir + "_b");
}

TEST_CASE("identical configs produce identical metrics digests") {
  const auto d1 = (fs::temp_directory_path() / "lzo_run_det1").string();
  const auto d2 = (fs::temp_directory_path() / "lzo_run_det2").string();
  fs::remove_all(d1);
  fs::remove_all(d2);
  std::ostringstream log;
  const auto r1 =
      lzo::run_train(lzo::parse_config_json(tiny_config("localzo", d1, 1)),
                     std::nullopt, log);
  const auto r2 =
      lzo::run_train(lzo::parse_config_json(tiny_config("localzo", d2, 1)),
                     std::nullopt, log);
  CHECK(r1.metrics_digest == r2.metrics_digest);
  CHECK(r1.data_digest == r2.data_digest);
  fs::remove_all(d1);
  fs::remove_all(d2);
}

TEST_CASE("thresholds CSV has the reference rows") {
  std::ostringstream os;
  lzo::write_thresholds_csv(os, 20000, 3);
  const std::string csv = os.str();
  CHECK(csv.find("family,m,delta,quadrature,mc_mean,mc_stderr,note") !=
        std::string::npos);
  CHECK(csv.find("normal,1,1,0.7978845") != std::string::npos);
  CHECK(csv.find("uniform,5,1,1.443375") != std::string::npos);
  CHECK(csv.find("sigmoid,1,0.05,") != std::string::npos);
  CHECK(csv.find("fastsigmoid,1,0.05,") != std::string::npos);
  CHECK(csv.find("DIVERGENCE-WARNING") != std::string::npos);
}

TEST_CASE("curves CSV matches the closed forms at pinned points") {
  std::ostringstream os;
  lzo::write_curves_csv(os, "normal", 0.0, {1.0}, -1.0, 1.0, 3, 20000, 3);
  // u = 0 row carries the closed-form value 0.39894.
  CHECK(os.str().find("normal,1,0,0.3989422804") != std::string::npos);

  std::ostringstream os2;
  lzo::write_curves_csv(os2, "uniform", 0.0, {0.5}, 1.0, 1.0, 2, 1000, 3);
  // |u|/delta = 2 > sqrt(3): outside the support, value 0.
  for (const auto& line : {std::string("uniform,0.5,1,0,")}) {
    CHECK(os2.str().find(line) != std::string::npos);
  }

  std::ostringstream os3;
  lzo::write_curves_csv(os3, "laplace", 0.0, {1.0}, 0.0, 0.0, 2, 1000, 3);
  CHECK(os3.str().find("laplace,1,0,0.3535533905") != std::string::npos);
}

}  // namespace

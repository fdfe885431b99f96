// Copyright (c) 2026 The localzo authors
// SPDX-License-Identifier: Apache-2.0
//
// Acceptance suite: every release criterion at full scale, one pass/fail
// line per criterion. Exits nonzero if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "localzo/harness.hpp"
#include "localzo/thresholds.hpp"
#include "localzo/verify.hpp"

namespace {

namespace fs = std::filesystem;
using clock_type = std::chrono::steady_clock;

int g_failures = 0;

void report(int id, const std::string& name, bool passed,
            const std::string& details) {
  std::cout << "[" << id << "] " << (passed ? "PASS" : "FAIL") << "  " << name;
  if (!details.empty()) std::cout << "  (" << details << ")";
  std::cout << std::endl;
  if (!passed) ++g_failures;
}

double seconds_since(clock_type::time_point t0) {
  return std::chrono::duration<double>(clock_type::now() - t0).count();
}

struct MetricsRow {
  long update;
  double loss, fwd_ms, bwd_ms;
  double mac_fwd, mac_bwd;
  std::vector<double> active_pct;
};

std::vector<MetricsRow> read_metrics(const std::string& path) {
  std::ifstream in(path);
  std::vector<MetricsRow> rows;
  std::string line;
  std::getline(in, line);  // header
  while (std::getline(in, line)) {
    std::istringstream ss(line);
    std::string field;
    MetricsRow r;
    std::getline(ss, field, ',');
    r.update = std::stol(field);
    std::getline(ss, field, ',');
    r.loss = std::stod(field);
    std::getline(ss, field, ',');
    r.fwd_ms = std::stod(field);
    std::getline(ss, field, ',');
    r.bwd_ms = std::stod(field);
    std::getline(ss, field, ',');
    r.mac_fwd = std::stod(field);
    std::getline(ss, field, ',');
    r.mac_bwd = std::stod(field);
    while (std::getline(ss, field, ',')) r.active_pct.push_back(std::stod(field));
    rows.push_back(std::move(r));
  }
  return rows;
}

// 1. Threshold table: quadrature within 1e-3 of the reference values and
//    within 3 SE of a 1e7-trial Monte-Carlo oracle, in under a minute.
void criterion_1() {
  const auto t0 = clock_type::now();
  const struct {
    lzo::DistKind kind;
    int m;
    double expect;
  } cells[] = {
      {lzo::DistKind::kNormal, 1, 0.798},  {lzo::DistKind::kNormal, 5, 1.569},
      {lzo::DistKind::kUniform, 1, 0.866}, {lzo::DistKind::kUniform, 5, 1.443},
      {lzo::DistKind::kLaplace, 1, 0.707}, {lzo::DistKind::kLaplace, 5, 1.615},
  };
  lzo::RngStream rng(1001);
  bool ok = true;
  std::ostringstream details;
  double worst_ref = 0.0, worst_sigma = 0.0;
  for (const auto& cell : cells) {
    const auto dist = lzo::Distribution::standard(cell.kind);
    const double quad = lzo::expected_threshold({dist, cell.m, 1.0});
    worst_ref = std::max(worst_ref, std::abs(quad - cell.expect));
    if (std::abs(quad - cell.expect) > 1e-3) ok = false;
    auto sub = rng.substream(static_cast<std::uint64_t>(cell.kind) * 8 +
                             static_cast<std::uint64_t>(cell.m));
    const auto mc =
        lzo::empirical_threshold_stats(dist, cell.m, 1.0, 10'000'000, sub);
    const double sigmas = std::abs(quad - mc.mean) / mc.std_error;
    worst_sigma = std::max(worst_sigma, sigmas);
    if (sigmas > 3.0) ok = false;
  }
  const double dt = seconds_since(t0);
  if (dt >= 60.0) ok = false;
  details << "worst |quad-ref|=" << worst_ref << ", worst MC sigmas="
          << worst_sigma << ", " << dt << "s";
  report(1, "threshold table reproduction", ok, details.str());
}

// 2. Derived-density thresholds: sigmoid at 0.766 delta, fast-sigmoid on
//    [-10,10] against its reference 0.0461, divergence warning on doubling.
void criterion_2() {
  const double delta = 0.05;
  const double k = std::sqrt(1.0 / lzo::sigmoid_shape_integral()) / delta;
  const auto sig = lzo::derive_lambda(lzo::SurrogateFn::sigmoid_grad(k), 1, delta);
  const auto sig_th = lzo::expected_threshold_tabulated(
      sig, -sig.default_support, sig.default_support, 1, delta);
  const bool sig_ok = std::abs(sig_th.value / delta - 0.766) <= 0.002;

  const auto fast =
      lzo::derive_lambda(lzo::SurrogateFn::fast_sigmoid_grad(100.0), -1, delta);
  const auto fast_th = lzo::expected_threshold_tabulated(fast, -10.0, 10.0, 1, delta);
  const bool fast_ok = std::abs(fast_th.value - 0.0461) <= 0.0005;
  const bool warn_ok = fast_th.divergence_warning;

  std::ostringstream details;
  details << "sigmoid B/delta=" << sig_th.value / delta
          << " (ref 0.766+-0.002), fastsigmoid B=" << fast_th.value
          << " (ref 0.0461+-0.0005, quadrature of the truncated integral"
          << " gives " << fast_th.value << "), doubling warning="
          << (warn_ok ? "fired" : "missing");
  report(2, "derived-density thresholds", sig_ok && fast_ok && warn_ok,
         details.str());
}

// 3. Unbiasedness: 1e7-draw MC mean of the raw estimator matches the
//    closed-form expected surrogate at 41 grid points, 3 SE, all nine
//    (family, delta) combinations, in under five minutes.
void criterion_3() {
  const auto t0 = clock_type::now();
  lzo::RngStream rng(1003);
  bool ok = true;
  double worst = 0.0;
  for (const auto kind : {lzo::DistKind::kNormal, lzo::DistKind::kUniform,
                          lzo::DistKind::kLaplace}) {
    for (double delta : {0.05, 0.5, 1.0}) {
      auto sub = rng.substream(static_cast<std::uint64_t>(kind) * 64 +
                               static_cast<std::uint64_t>(delta * 40));
      const auto cmp =
          lzo::compare_g2_mc_to_expected(kind, delta, 10'000'000, sub);
      worst = std::max(worst, cmp.worst_sigmas);
      if (cmp.failures != 0) ok = false;
    }
  }
  const double dt = seconds_since(t0);
  if (dt >= 300.0) ok = false;
  std::ostringstream details;
  details << "worst sigmas=" << worst << " over 9 combos x 41 points, " << dt
          << "s";
  report(3, "estimator unbiasedness vs closed forms", ok, details.str());
}

// 4. Round trip: sampling from the derived densities reproduces the sigmoid
//    and fast-sigmoid surrogates within 3 SE; derived scaling constants hit
//    1.0 and 0.02 within 1e-3.
void criterion_4() {
  const double delta = 0.05;
  lzo::RngStream rng(1004);
  const double k = std::sqrt(1.0 / lzo::sigmoid_shape_integral()) / delta;

  const auto sig = lzo::derive_lambda(lzo::SurrogateFn::sigmoid_grad(k), 1, delta);
  auto sub1 = rng.substream(1);
  const auto sig_cmp = lzo::compare_roundtrip(sig, delta, 10'000'000, sub1);
  const bool sig_ok =
      sig_cmp.failures == 0 && std::abs(sig.scale_c - 1.0) <= 1e-3;

  const auto fast =
      lzo::derive_lambda(lzo::SurrogateFn::fast_sigmoid_grad(100.0), -1, delta);
  auto sub2 = rng.substream(2);
  const auto fast_cmp = lzo::compare_roundtrip(fast, delta, 10'000'000, sub2);
  const bool fast_ok =
      fast_cmp.failures == 0 && std::abs(fast.scale_c - 0.02) <= 1e-3;

  std::ostringstream details;
  details << "sigmoid c=" << sig.scale_c << " worst sigmas="
          << sig_cmp.worst_sigmas << "; fastsigmoid c=" << fast.scale_c
          << " worst sigmas=" << fast_cmp.worst_sigmas;
  report(4, "derived-density round trip", sig_ok && fast_ok, details.str());
}

// 5. Shifted-Heaviside identity: finite differences of the Monte-Carlo
//    expectation match the direct quadrature within 5e-3.
void criterion_5() {
  lzo::RngStream rng(1005);
  std::vector<double> grid;
  for (int i = 0; i < 21; ++i) grid.push_back(-2.0 + 4.0 * i / 20.0);
  bool ok = true;
  std::ostringstream details;
  for (const auto kind : {lzo::DistKind::kNormal, lzo::DistKind::kUniform,
                          lzo::DistKind::kLaplace}) {
    const auto dist = lzo::Distribution::standard(kind);
    auto sub = rng.substream(static_cast<std::uint64_t>(kind));
    const double err =
        lzo::check_thm_identity(dist, grid, 0.5, 1, 10'000'000, 1e-2, sub);
    details << dist.name() << "=" << err << " ";
    if (!(err < 5e-3)) ok = false;
  }
  report(5, "heaviside-shift derivative identity", ok,
         "max errs: " + details.str());
}

// 6. Mass identity: the expected surrogate integrates to 1 for the three
//    unit-variance families, independent of delta.
void criterion_6() {
  bool ok = true;
  double worst = 0.0;
  for (const auto kind : {lzo::DistKind::kNormal, lzo::DistKind::kUniform,
                          lzo::DistKind::kLaplace}) {
    for (double delta : {0.05, 0.5, 1.0}) {
      const double mass = lzo::expected_surrogate_mass(kind, delta);
      worst = std::max(worst, std::abs(mass - 1.0));
      if (std::abs(mass - 1.0) > 1e-3) ok = false;
    }
  }
  std::ostringstream details;
  details << "worst |mass-1|=" << worst;
  report(6, "expected-surrogate mass identity", ok, details.str());
}

// 7. Backward-mode equivalences: gating == truncated surrogate, sparse ==
//    dense replay, and the local-ZO gradient mean matches the expected-
//    surrogate gradient coordinate-wise over 1e4 replications.
void criterion_7() {
  const double gating = lzo::check_gating_equivalence(1007);
  const double replay = lzo::check_dense_replay(1008);
  const auto consistency = lzo::check_expectation_consistency(10'000, 1009);
  const bool ok = gating <= 1e-12 && replay <= 1e-10 &&
                  consistency.failures == 0;
  std::ostringstream details;
  details << "gating max|diff|=" << gating << ", replay max rel="
          << replay << ", consistency worst sigmas="
          << consistency.worst_sigmas << " over " << consistency.coords
          << " coords";
  report(7, "backward-mode equivalences", ok, details.str());
}

// 8/9/10. Desk-scale training, sparsity proxy, determinism.
void criteria_8_9_10() {
  const auto root = fs::temp_directory_path() / "lzo_acceptance";
  fs::remove_all(root);
  fs::create_directories(root);

  lzo::ExperimentConfig cfg;
  cfg.mode = "surrogate";
  cfg.distribution = "normal";
  cfg.delta = 0.05;
  cfg.m = 1;
  cfg.dims = {100, 200, 200, 10};
  cfg.epochs = 20;
  cfg.batch = 128;
  cfg.seed = 1;
  cfg.data.synthetic = true;
  cfg.data.synth = {10, 100, 50, 1.0, 0.2};
  cfg.data.n_train = 2048;
  cfg.data.n_test = 512;
  cfg.outdir = (root / "surrogate").string();

  std::ostringstream log;
  const auto t0 = clock_type::now();
  const auto surr = lzo::run_train(cfg, std::nullopt, log);

  lzo::ExperimentConfig zcfg = cfg;
  zcfg.mode = "localzo";
  zcfg.outdir = (root / "localzo").string();
  const auto zo = lzo::run_train(zcfg, cfg.outdir, log);
  const double dt = seconds_since(t0);

  {
    const bool surr_ok = surr.final_test_acc >= 0.90;
    const bool gap_ok = zo.final_test_acc >= surr.final_test_acc - 0.02;
    std::ostringstream details;
    details << "surrogate test_acc=" << surr.final_test_acc
            << ", localzo test_acc=" << zo.final_test_acc << ", " << dt
            << "s for both runs";
    report(8, "desk-scale training accuracy", surr_ok && gap_ok, details.str());
  }

  {
    const auto surr_rows = read_metrics(cfg.outdir + "/metrics.csv");
    const auto zo_rows = read_metrics(zcfg.outdir + "/metrics.csv");
    const int per_epoch = 2048 / 128;
    bool ok = true;
    std::ostringstream details;
    // Fresh network: first update active fraction below 15%.
    double fresh = 0.0;
    for (double a : zo_rows.front().active_pct) fresh = std::max(fresh, a);
    if (fresh >= 15.0) ok = false;
    // After one epoch: below 2% per layer.
    double after = 0.0;
    for (double a : zo_rows[static_cast<std::size_t>(per_epoch)].active_pct)
      after = std::max(after, a);
    if (after >= 2.0) ok = false;
    // Backward MAC ratio against the paired dense run, epoch-1 updates.
    double zo_macs = 0.0, surr_macs = 0.0;
    for (int i = 0; i < per_epoch; ++i) {
      zo_macs += zo_rows[static_cast<std::size_t>(i)].mac_bwd;
      surr_macs += surr_rows[static_cast<std::size_t>(i)].mac_bwd;
    }
    const double ratio = zo_macs / surr_macs;
    if (!(ratio < 0.05)) ok = false;
    details << "fresh active%=" << fresh << ", after-1-epoch active%="
            << after << ", epoch-1 backward MAC ratio=" << ratio;
    report(9, "sparsity and energy proxy", ok, details.str());
  }

  {
    lzo::ExperimentConfig d1 = zcfg;
    d1.dims = {30, 32, 32, 5};
    d1.data.synth = {5, 30, 16, 1.0, 0.3};
    d1.data.n_train = 128;
    d1.data.n_test = 64;
    d1.epochs = 2;
    d1.batch = 32;
    d1.outdir = (root / "det1").string();
    lzo::ExperimentConfig d2 = d1;
    d2.outdir = (root / "det2").string();
    const auto r1 = lzo::run_train(d1, std::nullopt, log);
    const auto r2 = lzo::run_train(d2, std::nullopt, log);
    const bool ok = r1.metrics_digest == r2.metrics_digest &&
                    r1.data_digest == r2.data_digest;
    std::ostringstream details;
    details << std::hex << "digests " << r1.metrics_digest << " vs "
            << r2.metrics_digest;
    report(10, "determinism of paired runs", ok, details.str());
  }

  fs::remove_all(root);
}

}  // namespace

int main() {
  std::cout << "acceptance suite" << std::endl;
  const auto t0 = clock_type::now();
  try {
    criterion_1();
    criterion_2();
    criterion_3();
    criterion_4();
    criterion_5();
    criterion_6();
    criterion_7();
    criteria_8_9_10();
  } catch (const std::exception& e) {
    std::cerr << "acceptance suite aborted: " << e.what() << std::endl;
    return 2;
  }
  std::cout << (g_failures == 0 ? "ALL CRITERIA PASSED"
                                : std::to_string(g_failures) +
                                      " CRITERIA FAILED")
            << "  (" << seconds_since(t0) << "s total)" << std::endl;
  return g_failures == 0 ? 0 : 1;
}

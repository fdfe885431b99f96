// Copyright (c) 2026 The localzo authors
// SPDX-License-Identifier: Apache-2.0
//
// Invariant suites for all modules, runnable at two scales, plus the reusable
// Monte-Carlo comparison blocks the acceptance tests build on.

#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "localzo/distributions.hpp"
#include "localzo/zo_surrogate.hpp"

namespace lzo {

enum class VerifyLevel { kQuick, kFull };

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string details;
};

std::vector<CheckResult> run_verification(VerifyLevel level, std::uint64_t seed);

// Prints one line per check; returns the number of failures.
int print_verification(std::ostream& os, VerifyLevel level, std::uint64_t seed);

// --- building blocks ---

// Compares the Monte-Carlo mean of the raw estimator against a reference
// curve on a symmetric u-grid, in units of Monte-Carlo standard errors.
struct McGridCompare {
  int grid_points = 0;
  int failures = 0;       // points with |mc - ref| > 3 SE
  double worst_sigmas = 0.0;
  double worst_abs = 0.0;
};

// z ~ standard(kind), reference = closed-form expected surrogate (alpha = 1).
McGridCompare compare_g2_mc_to_expected(DistKind kind, double delta,
                                        std::int64_t draws, RngStream& rng,
                                        int grid_points = 41);

// z ~ derived lambda (tabulated over its default support, or the exact
// quantile sampler when available), reference = the source surrogate,
// estimator scaled by scale_c.
McGridCompare compare_roundtrip(const DerivedLambda& lambda, double delta,
                                std::int64_t draws, RngStream& rng,
                                int grid_points = 41);

// Numeric integral of the closed-form expected surrogate over u.
double expected_surrogate_mass(DistKind kind, double delta);

// Max |sparse - dense| over all weight-gradient entries: threshold-gated
// sparse backward vs the dense backward run on the truncated-surrogate tape.
double check_gating_equivalence(std::uint64_t seed);

// Max relative difference between the local-ZO sparse backward and a dense
// backward replay of the same realized tape values.
double check_dense_replay(std::uint64_t seed);

// Mean local-ZO weight gradient over `reps` independent forward samplings vs
// the dense expected-surrogate gradient, coordinate-wise in 3 SE units.
struct ExpectationConsistency {
  int coords = 0;
  int failures = 0;
  double worst_sigmas = 0.0;
};
ExpectationConsistency check_expectation_consistency(int reps,
                                                     std::uint64_t seed);

// Max relative error between BPTT weight gradients and central finite
// differences of a forward replay with the Heaviside frozen to its recorded
// linearization.
double check_bptt_linearized_fd(std::uint64_t seed);

// Bitwise determinism of tapes and gradients across two identically seeded
// runs.
bool check_forward_determinism(std::uint64_t seed);

}  // namespace lzo

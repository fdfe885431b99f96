// Copyright (c) 2026 The localzo authors
// SPDX-License-Identifier: Apache-2.0
//
// Expected back-propagation threshold: delta * E[max_k |z_k|] for m draws,
// by closed form or quadrature, with a Monte-Carlo oracle.

#pragma once

#include <cstdint>

#include "localzo/distributions.hpp"
#include "localzo/rng.hpp"
#include "localzo/zo_surrogate.hpp"

namespace lzo {

struct ThresholdQuery {
  Distribution dist;
  int m = 1;
  double delta = 1.0;

  void validate() const;  // m >= 1, delta > 0, dist even
};

// delta * E[max(|z_1|,...,|z_m|)]: closed form delta*sqrt(3)*m/(m+1) for the
// symmetric uniform family, adaptive quadrature otherwise (upper limit at the
// 1 - 1e-12 quantile of |z|).
double expected_threshold(const ThresholdQuery& query);

struct TabulatedThreshold {
  double value = 0.0;
  // Set when the same integral over the doubled support moves by more than
  // 1%; the finite-support value is still returned.
  bool divergence_warning = false;
  double doubled_support_value = 0.0;
};

// Same quantity for a derived density restricted to [lo, hi], with the |z|
// CDF accumulated by running Riemann sums over the support.
TabulatedThreshold expected_threshold_tabulated(const DerivedLambda& lambda,
                                                double lo, double hi, int m,
                                                double delta);

// Monte-Carlo oracle: mean over `trials` of delta * max_k |z_k|.
double empirical_threshold(const Distribution& dist, int m, double delta,
                           std::int64_t trials, RngStream& rng);

struct MonteCarloStat {
  double mean = 0.0;
  double std_error = 0.0;
};

MonteCarloStat empirical_threshold_stats(const Distribution& dist, int m,
                                         double delta, std::int64_t trials,
                                         RngStream& rng);

}  // namespace lzo

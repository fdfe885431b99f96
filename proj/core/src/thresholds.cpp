// Copyright (c) 2026 The localzo authors
// SPDX-License-Identifier: Apache-2.0

#include "localzo/thresholds.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "localzo/quadrature.hpp"

namespace lzo {

void ThresholdQuery::validate() const {
  if (m < 1) throw ConfigError("ThresholdQuery: m must be >= 1");
  if (!(delta > 0.0)) throw ConfigError("ThresholdQuery: delta must be > 0");
  if (!dist.is_even())
    throw DomainError("ThresholdQuery: distribution must be even about 0");
}

double expected_threshold(const ThresholdQuery& query) {
  query.validate();
  const auto& dist = query.dist;
  const double m = static_cast<double>(query.m);

  if (dist.kind() == DistKind::kUniform) {
    // max of m uniform |z| draws on [0, b]: E = b m/(m+1).
    const double b = dist.param1();
    return query.delta * b * m / (m + 1.0);
  }

  const double z_hi = dist.abs_quantile(1.0 - 1e-12);
  const double value = adaptive_simpson(
      [&](double t) {
        const double f = dist.abs_cdf(t);
        return t * std::pow(f, m - 1.0) * 2.0 * dist.pdf(t);
      },
      0.0, z_hi, 1e-10);
  return query.delta * m * value;
}

namespace {

// delta * m * int_0^hi t F^{m-1}(t) 2 lambda(t) dt with F accumulated as a
// running Riemann sum of 2 lambda over [0, hi].
double tabulated_threshold_on(const DerivedLambda& lambda, double hi, int m,
                              double delta) {
  const int n = 200001;
  const double h = hi / (n - 1);
  double cdf = 0.0;
  double integral = 0.0;
  double prev_pdf2 = 2.0 * lambda.pdf(0.0);
  double prev_term = 0.0;  // t F^{m-1} 2 lambda at t=0 (t factor kills it)
  for (int i = 1; i < n; ++i) {
    const double t = h * i;
    const double pdf2 = 2.0 * lambda.pdf(t);
    cdf += 0.5 * h * (prev_pdf2 + pdf2);
    const double term = t * std::pow(std::min(cdf, 1.0), m - 1) * pdf2;
    integral += 0.5 * h * (prev_term + term);
    prev_pdf2 = pdf2;
    prev_term = term;
  }
  return delta * static_cast<double>(m) * integral;
}

}  // namespace

TabulatedThreshold expected_threshold_tabulated(const DerivedLambda& lambda,
                                                double lo, double hi, int m,
                                                double delta) {
  if (!(lo < 0.0 && hi > 0.0 && std::abs(lo + hi) < 1e-9 * hi))
    throw ConfigError("expected_threshold_tabulated: support must be [-a, a]");
  if (m < 1) throw ConfigError("expected_threshold_tabulated: m must be >= 1");
  if (!(delta > 0.0))
    throw ConfigError("expected_threshold_tabulated: delta must be > 0");

  TabulatedThreshold out;
  out.value = tabulated_threshold_on(lambda, hi, m, delta);
  out.doubled_support_value = tabulated_threshold_on(lambda, 2.0 * hi, m, delta);
  out.divergence_warning =
      std::abs(out.doubled_support_value - out.value) > 0.01 * std::abs(out.value);
  return out;
}

MonteCarloStat empirical_threshold_stats(const Distribution& dist, int m,
                                         double delta, std::int64_t trials,
                                         RngStream& rng) {
  if (m < 1) throw ConfigError("empirical_threshold: m must be >= 1");
  if (trials < 1) throw ConfigError("empirical_threshold: trials must be >= 1");
  double sum = 0.0, sumsq = 0.0;
  for (std::int64_t i = 0; i < trials; ++i) {
    double mx = 0.0;
    for (int k = 0; k < m; ++k) mx = std::max(mx, std::abs(dist.sample(rng)));
    const double v = delta * mx;
    sum += v;
    sumsq += v * v;
  }
  const double n = static_cast<double>(trials);
  const double mean = sum / n;
  const double var = std::max(0.0, sumsq / n - mean * mean);
  return {mean, std::sqrt(var / n)};
}

double empirical_threshold(const Distribution& dist, int m, double delta,
                           std::int64_t trials, RngStream& rng) {
  return empirical_threshold_stats(dist, m, delta, trials, rng).mean;
}

}  // namespace lzo

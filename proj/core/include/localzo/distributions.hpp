// Copyright (c) 2026 The localzo authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "localzo/errors.hpp"
#include "localzo/rng.hpp"

namespace lzo {

// Discretized inverse CDF built from an arbitrary PDF on a finite support.
// `inv_cdf[j]` is the value at quantile j / (grid_n - 1); `pdf_vals` and
// `cdf_vals` are evaluated on the regular x-grid over [lo, hi].
struct InverseCdfTable {
  double lo = 0.0;
  double hi = 0.0;
  std::int64_t grid_n = 0;
  std::vector<double> inv_cdf;
  std::string source_pdf_id;
  std::vector<double> pdf_vals;  // renormalized so the trapezoid CDF ends at 1
  std::vector<double> cdf_vals;

  double grid_x(std::int64_t i) const {
    return lo + (hi - lo) * static_cast<double>(i) /
                    static_cast<double>(grid_n - 1);
  }
};

// Riemann-sum CDF on a regular grid over [lo, hi], renormalized to end at
// exactly 1, inverted onto grid_n regularly spaced quantiles.
// Throws ConfigError for bad arguments and DomainError for a PDF whose
// integral over the support is below 1e-12.
InverseCdfTable build_inverse_cdf_table(const std::function<double(double)>& pdf,
                                        double lo, double hi,
                                        std::int64_t grid_n,
                                        std::string source_pdf_id = "");

// Little-endian blob: magic "LZOTBL1", lo, hi (f64), grid_n (u64), then
// grid_n f64 inverse-CDF values. The PDF/CDF grids are reconstructed from
// the quantile table on load, so a loaded table samples identically but its
// pdf() is a numerical estimate.
void save_table(const InverseCdfTable& table, const std::string& path);
InverseCdfTable load_table(const std::string& path);

enum class DistKind { kNormal, kUniform, kLaplace, kTabulated };

// Sampling distribution for the per-neuron zeroth-order estimator. Immutable
// after construction; safe to share across threads.
class Distribution {
 public:
  static Distribution normal(double mean, double stddev);
  static Distribution uniform(double a, double b);
  static Distribution laplace(double mu, double b);
  static Distribution tabulated(InverseCdfTable table);

  // The three unit-variance families used throughout: Normal(0,1),
  // Uniform(-sqrt3, sqrt3), Laplace(0, 1/sqrt2).
  static Distribution standard(DistKind kind);

  DistKind kind() const { return kind_; }
  const std::string& name() const { return name_; }

  double pdf(double x) const;
  double cdf(double x) const;

  // F_{|z|}(x) = 2 (F(x) - F(0)) for x >= 0, else 0. Requires evenness.
  double abs_cdf(double x) const;

  double sample(RngStream& rng) const;
  void sample(RngStream& rng, std::span<double> out) const;

  bool is_even(double tol = 1e-9) const;

  // [lo, hi]; +-inf for unbounded analytic supports.
  std::pair<double, double> support() const;

  // Smallest x with F_{|z|}(x) >= p (monotone bisection). Used to truncate
  // improper integrals over |z|.
  double abs_quantile(double p) const;

  // Parameter accessors (meaningful per kind).
  double param0() const { return p0_; }
  double param1() const { return p1_; }
  const InverseCdfTable& table() const;

 private:
  Distribution(DistKind kind, double p0, double p1, std::string name)
      : kind_(kind), p0_(p0), p1_(p1), name_(std::move(name)) {}

  DistKind kind_;
  double p0_ = 0.0;  // mean / a / mu
  double p1_ = 0.0;  // stddev / b / b
  std::string name_;
  std::shared_ptr<const InverseCdfTable> table_;
};

}  // namespace lzo

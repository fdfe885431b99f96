// Copyright (c) 2026 The localzo authors
// SPDX-License-Identifier: Apache-2.0
//
// Per-neuron two-point zeroth-order gradient estimator, surrogate-gradient
// definitions, their closed-form expectations under z-sampling, and the
// surrogate -> sampling-distribution construction.

#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>

#include "localzo/distributions.hpp"
#include "localzo/rng.hpp"

namespace lzo {

// (delta, alpha, m, scale) tuple controlling the estimator. `scale` is the
// constant c multiplying stored gradients so their expectation matches the
// target surrogate; the raw estimator itself is unscaled.
struct ZOConfig {
  double delta = 0.05;
  int alpha = 1;
  int m = 1;
  double scale = 1.0;

  void validate() const;  // throws ConfigError
};

// Raw estimator: |z|^alpha / (2 delta) when |u| <= |z| delta (boundary
// inclusive), else 0. cfg.scale is NOT applied here.
double g2_estimate(double u, double z, const ZOConfig& cfg);

// z = 0 draws with alpha < 0 contribute 0 and bump this diagnostics counter
// (possible only with tabulated samplers, which can emit exact zeros).
std::uint64_t degenerate_sample_count();
void reset_degenerate_sample_count();

struct LocalZOGrad {
  double grad;  // cfg.scale * mean over m draws of g2_estimate
  bool active;  // grad != 0, i.e. |u| <= delta * max_k |z_k|
};

LocalZOGrad local_zo_grad(double u, const ZOConfig& cfg, RngStream& rng,
                          const Distribution& dist);

// Closed-form E[G^2(u; z, delta)] for z ~ unit-variance Normal / Uniform /
// Laplace, alpha = 1.
double expected_surrogate(DistKind kind, double u, double delta);

enum class SurrogateKind {
  kSigmoidGrad,      // k e^{-k|u|} / (1 + e^{-k|u|})^2
  kFastSigmoidGrad,  // 1 / (1 + k|u|)^2
  kExpectedNormal,   // closed-form expectations above, parameterized by delta
  kExpectedUniform,
  kExpectedLaplace,
};

struct SurrogateFn {
  SurrogateKind kind;
  double param;  // temperature k, or delta for the expected forms

  double operator()(double u) const;

  static SurrogateFn sigmoid_grad(double k);
  static SurrogateFn fast_sigmoid_grad(double k);
  static SurrogateFn expected_normal(double delta);
  static SurrogateFn expected_uniform(double delta);
  static SurrogateFn expected_laplace(double delta);

  std::string name() const;
};

double surrogate_eval(const SurrogateFn& g, double u);

// Checks the surrogate-function requirements: even, non-decreasing on the
// negative half-line, finite integral.
struct ValidityReport {
  double evenness_max_dev = 0.0;
  int monotonicity_violations = 0;
  double integral_c = 0.0;
  bool integral_converged = false;
  bool even_ok = false;
  bool monotone_ok = false;

  bool pass() const { return even_ok && monotone_ok && integral_converged; }
};

ValidityReport validate_surrogate(const std::function<double(double)>& g,
                                  std::span<const double> grid);
// Overload with analytic integral tails for the named kinds.
ValidityReport validate_surrogate(const SurrogateFn& g,
                                  std::span<const double> grid);

// lambda(z) = -delta^2 / (c z^alpha) * g'(z delta), even in z, together with
// the scaling constant c = -2 delta^2 int_0^inf z^-alpha g'(z delta) dz.
struct DerivedLambda {
  std::function<double(double)> pdf;
  double scale_c = 0.0;
  int alpha = 1;
  SurrogateFn source;
  // Quantile function of |z| when available in closed form (fast-sigmoid
  // family); empty otherwise. Enables exact full-support sampling where the
  // finite-support table would bias expectations.
  std::function<double(double)> abs_quantile;
  // Half-width of the default tabulation support.
  double default_support = 0.0;
};

// Throws NonConvergenceError, naming the (surrogate, alpha) pair, when the
// c-integral fails to converge.
DerivedLambda derive_lambda(const SurrogateFn& g, int alpha, double delta);

// Exact inverse-transform draw over the full support; requires abs_quantile.
double sample_derived_exact(const DerivedLambda& lambda, RngStream& rng);

// Tabulated sampler over [-half_width, half_width].
Distribution tabulate_derived(const DerivedLambda& lambda, double half_width,
                              std::int64_t grid_n = 100000);

// Quadrature value of 2 int_0^inf e^{-x}(1-e^{-x}) / (x (1+e^{-x})^3) dx,
// the shape integral behind the sigmoid-derived density's scaling constant.
// Computed once and cross-checked against its 4-digit reference value.
double sigmoid_shape_integral();

// Identity check between the finite-difference derivative of the shifted
// Heaviside expectation (z ~ lambda-tilde, common random numbers) and the
// quadrature of E[G^2]. Returns the max absolute discrepancy over u_grid.
// Throws DomainError when the required moments of `dist` diverge.
double check_thm_identity(const Distribution& dist,
                          std::span<const double> u_grid, double delta,
                          int alpha, std::int64_t draws, double fd_step,
                          RngStream& rng);

}  // namespace lzo

// Copyright (c) 2026 The localzo authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>

#include <doctest.h>

#include "localzo/thresholds.hpp"

namespace {

constexpr double kSqrt3 = 1.7320508075688772;

TEST_CASE("reference threshold table at delta = 1") {
  const struct {
    lzo::DistKind kind;
    int m;
    double expect;
  } cells[] = {
      {lzo::DistKind::kNormal, 1, 0.798},  {lzo::DistKind::kNormal, 5, 1.569},
      {lzo::DistKind::kUniform, 1, 0.866}, {lzo::DistKind::kUniform, 5, 1.443},
      {lzo::DistKind::kLaplace, 1, 0.707}, {lzo::DistKind::kLaplace, 5, 1.615},
  };
  for (const auto& c : cells) {
    const double v =
        lzo::expected_threshold({lzo::Distribution::standard(c.kind), c.m, 1.0});
    CHECK(std::abs(v - c.expect) <= 1e-3);
  }

  // Independent closed forms: E|z| of the standard normal and the binomial
  // expansion of the Laplace order-statistic integral.
  CHECK(lzo::expected_threshold({lzo::Distribution::standard(lzo::DistKind::kNormal),
                                 1, 1.0}) ==
        doctest::Approx(std::sqrt(2.0 / M_PI)).epsilon(1e-8));
  CHECK(lzo::expected_threshold({lzo::Distribution::standard(lzo::DistKind::kUniform),
                                 5, 1.0}) ==
        doctest::Approx(kSqrt3 * 5.0 / 6.0).epsilon(1e-10));
  double laplace5 = 0.0;
  const double binom[5] = {1, 4, 6, 4, 1};
  for (int j = 0; j < 5; ++j)
    laplace5 += (j % 2 == 0 ? 1.0 : -1.0) * binom[j] /
                (2.0 * (j + 1.0) * (j + 1.0));
  laplace5 *= 5.0 * std::sqrt(2.0);
  CHECK(lzo::expected_threshold({lzo::Distribution::standard(lzo::DistKind::kLaplace),
                                 5, 1.0}) ==
        doctest::Approx(laplace5).epsilon(1e-8));
}

TEST_CASE("quadrature agrees with the Monte-Carlo oracle") {
  lzo::RngStream rng(77);
  for (const auto& [kind, m] :
       {std::pair{lzo::DistKind::kNormal, 1}, {lzo::DistKind::kUniform, 5},
        {lzo::DistKind::kLaplace, 5}}) {
    const auto dist = lzo::Distribution::standard(kind);
    const double quad = lzo::expected_threshold({dist, m, 1.0});
    auto sub = rng.substream(static_cast<std::uint64_t>(kind) * 8 +
                             static_cast<std::uint64_t>(m));
    const auto mc = lzo::empirical_threshold_stats(dist, m, 1.0, 1'000'000, sub);
    CHECK(std::abs(quad - mc.mean) <= 3.0 * mc.std_error);
  }
}

TEST_CASE("threshold properties") {
  const auto normal = lzo::Distribution::standard(lzo::DistKind::kNormal);

  double prev = 0.0;
  for (int m = 1; m <= 8; ++m) {
    const double v = lzo::expected_threshold({normal, m, 1.0});
    CHECK(v > prev);
    prev = v;
  }

  for (double delta : {0.05, 0.5, 2.0}) {
    CHECK(lzo::expected_threshold({normal, 3, delta}) ==
          doctest::Approx(delta * lzo::expected_threshold({normal, 3, 1.0}))
              .epsilon(1e-12));
  }

  // Uniform limit: large m approaches the support endpoint.
  CHECK(lzo::expected_threshold(
            {lzo::Distribution::standard(lzo::DistKind::kUniform), 2000, 1.0}) ==
        doctest::Approx(kSqrt3).epsilon(1e-3));

  lzo::RngStream rng(78);
  CHECK(lzo::empirical_threshold(normal, 1, 0.0, 1000, rng) == 0.0);

  CHECK_THROWS_AS(
      lzo::expected_threshold({lzo::Distribution::normal(1.0, 1.0), 1, 1.0}),
      lzo::DomainError);
  CHECK_THROWS_AS(lzo::expected_threshold({normal, 0, 1.0}), lzo::ConfigError);
}

TEST_CASE("tabulated thresholds for derived densities") {
  const double delta = 0.05;
  const double shape = lzo::sigmoid_shape_integral();
  const double a = std::sqrt(1.0 / shape);
  const double k = a / delta;

  const auto sig = lzo::derive_lambda(lzo::SurrogateFn::sigmoid_grad(k), 1, delta);
  const auto sig_th = lzo::expected_threshold_tabulated(
      sig, -sig.default_support, sig.default_support, 1, delta);
  // E|z| = a/2 for this density.
  CHECK(sig_th.value / delta == doctest::Approx(a / 2.0).epsilon(1e-4));
  CHECK(std::abs(sig_th.value / delta - 0.766) <= 0.002);
  CHECK_FALSE(sig_th.divergence_warning);

  const auto fast =
      lzo::derive_lambda(lzo::SurrogateFn::fast_sigmoid_grad(100.0), -1, delta);
  const auto fast_th = lzo::expected_threshold_tabulated(fast, -10.0, 10.0, 1, delta);
  // Closed form of the truncated integral: with s = k delta and A = 10 s,
  // value = (2/k) (ln(1+A) + 2/(1+A) - 1/(2(1+A)^2) - 3/2).
  const double A = 50.0;
  const double closed =
      0.02 * (std::log(1.0 + A) + 2.0 / (1.0 + A) -
              1.0 / (2.0 * (1.0 + A) * (1.0 + A)) - 1.5);
  CHECK(fast_th.value == doctest::Approx(closed).epsilon(1e-5));
  CHECK(fast_th.divergence_warning);
  CHECK(fast_th.doubled_support_value > fast_th.value * 1.01);

  const double A2 = 100.0;
  const double closed2 =
      0.02 * (std::log(1.0 + A2) + 2.0 / (1.0 + A2) -
              1.0 / (2.0 * (1.0 + A2) * (1.0 + A2)) - 1.5);
  CHECK(fast_th.doubled_support_value == doctest::Approx(closed2).epsilon(1e-5));
}

}  // namespace

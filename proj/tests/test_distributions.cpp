// Copyright (c) 2026 The localzo authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <cstdio>
#include <filesystem>

#include <doctest.h>

#include "localzo/distributions.hpp"
#include "localzo/quadrature.hpp"

namespace {

constexpr double kSqrt3 = 1.7320508075688772;

TEST_CASE("pdf values against quadrature normalization oracles") {
  // Normal(0,1) density at 0 equals 1 / integral of exp(-x^2/2).
  const double norm_const = lzo::adaptive_simpson(
      [](double x) { return std::exp(-x * x / 2.0); }, -12.0, 12.0, 1e-12);
  const auto normal = lzo::Distribution::normal(0, 1);
  CHECK(normal.pdf(0.0) == doctest::Approx(1.0 / norm_const).epsilon(1e-9));
  CHECK(normal.pdf(0.0) == doctest::Approx(0.3989423).epsilon(1e-6));

  // Laplace(0, 1/sqrt2) at 0: 1/(2b), cross-checked by normalizing exp(-|x|/b).
  const double b = 1.0 / std::sqrt(2.0);
  const double lap_const = lzo::adaptive_simpson(
      [b](double x) { return std::exp(-std::abs(x) / b); }, -40.0, 40.0, 1e-12);
  const auto laplace = lzo::Distribution::laplace(0, b);
  CHECK(laplace.pdf(0.0) == doctest::Approx(1.0 / lap_const).epsilon(1e-8));
  CHECK(laplace.pdf(0.0) == doctest::Approx(std::sqrt(2.0) / 2.0).epsilon(1e-9));

  const auto uniform = lzo::Distribution::uniform(-kSqrt3, kSqrt3);
  CHECK(uniform.pdf(0.0) == doctest::Approx(1.0 / (2.0 * kSqrt3)).epsilon(1e-12));
  CHECK(uniform.pdf(2.0) == 0.0);
}

TEST_CASE("parameter validation happens at construction") {
  CHECK_THROWS_AS(lzo::Distribution::normal(0, 0.0), lzo::ConfigError);
  CHECK_THROWS_AS(lzo::Distribution::normal(0, -1.0), lzo::ConfigError);
  CHECK_THROWS_AS(lzo::Distribution::uniform(1.0, 1.0), lzo::ConfigError);
  CHECK_THROWS_AS(lzo::Distribution::uniform(2.0, -2.0), lzo::ConfigError);
  CHECK_THROWS_AS(lzo::Distribution::laplace(0, 0.0), lzo::ConfigError);
}

TEST_CASE("pdf is even and integrates to 1 for the standard families") {
  for (const auto kind : {lzo::DistKind::kNormal, lzo::DistKind::kUniform,
                          lzo::DistKind::kLaplace}) {
    const auto dist = lzo::Distribution::standard(kind);
    for (int i = 0; i <= 1000; ++i) {
      const double x = -6.0 + 12.0 * i / 1000.0;
      CHECK(std::abs(dist.pdf(x) - dist.pdf(-x)) <= 1e-12);
    }
    const double hi = dist.abs_quantile(1.0 - 1e-14);
    const double mass = 2.0 * lzo::adaptive_simpson(
                                  [&](double x) { return dist.pdf(x); }, 0.0,
                                  hi, 1e-10);
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-6));
  }
}

TEST_CASE("sampling moments and supports") {
  lzo::RngStream rng(123);
  const int n = 1'000'000;

  const auto normal = lzo::Distribution::normal(0, 1);
  double sum = 0, sumsq = 0;
  for (int i = 0; i < n; ++i) {
    const double z = normal.sample(rng);
    sum += z;
    sumsq += z * z;
  }
  const double mean = sum / n;
  const double var = sumsq / n - mean * mean;
  CHECK(mean > -0.004);
  CHECK(mean < 0.004);
  CHECK(var > 0.99);
  CHECK(var < 1.01);

  const auto uniform = lzo::Distribution::uniform(-kSqrt3, kSqrt3);
  for (int i = 0; i < 100000; ++i) {
    const double z = uniform.sample(rng);
    CHECK(z >= -kSqrt3);
    CHECK(z <= kSqrt3);
  }

  // Laplace variance 2 b^2 = 1 for the standard member.
  const auto laplace = lzo::Distribution::standard(lzo::DistKind::kLaplace);
  sum = sumsq = 0;
  for (int i = 0; i < n; ++i) {
    const double z = laplace.sample(rng);
    sum += z;
    sumsq += z * z;
  }
  CHECK(sumsq / n - (sum / n) * (sum / n) == doctest::Approx(1.0).epsilon(0.01));
}

TEST_CASE("abs_cdf follows the closed |z|-CDF forms") {
  const auto normal = lzo::Distribution::normal(0, 1);
  CHECK(normal.abs_cdf(1.0) ==
        doctest::Approx(std::erf(1.0 / std::sqrt(2.0))).epsilon(1e-12));
  CHECK(normal.abs_cdf(1.0) == doctest::Approx(0.682689).epsilon(1e-5));
  CHECK(normal.abs_cdf(-0.5) == 0.0);

  const auto uniform = lzo::Distribution::uniform(-kSqrt3, kSqrt3);
  CHECK(uniform.abs_cdf(kSqrt3 / 2.0) == doctest::Approx(0.5).epsilon(1e-12));

  const auto laplace = lzo::Distribution::standard(lzo::DistKind::kLaplace);
  CHECK(laplace.abs_cdf(0.0) == 0.0);
  CHECK(laplace.abs_cdf(1.0) ==
        doctest::Approx(1.0 - std::exp(-std::sqrt(2.0))).epsilon(1e-12));

  // Identity 2 (F(x) - F(0)) against the generic cdf.
  for (double x : {0.1, 0.7, 1.9}) {
    CHECK(normal.abs_cdf(x) ==
          doctest::Approx(2.0 * (normal.cdf(x) - normal.cdf(0.0)))
              .epsilon(1e-10));
  }

  const auto shifted = lzo::Distribution::normal(0.5, 1.0);
  CHECK_THROWS_AS(shifted.abs_cdf(1.0), lzo::DomainError);
  CHECK_FALSE(shifted.is_even());
}

TEST_CASE("inverse-CDF table construction") {
  const auto uniform_pdf = [](double x) {
    return (x >= -kSqrt3 && x <= kSqrt3) ? 1.0 / (2.0 * kSqrt3) : 0.0;
  };
  const auto table =
      lzo::build_inverse_cdf_table(uniform_pdf, -kSqrt3, kSqrt3, 10000, "unif");
  CHECK(std::abs(table.inv_cdf[5000]) <= 2.0 * kSqrt3 / 10000.0);
  for (std::size_t i = 1; i < table.inv_cdf.size(); ++i)
    CHECK(table.inv_cdf[i] >= table.inv_cdf[i - 1]);
  CHECK(table.inv_cdf.front() >= table.lo);
  CHECK(table.inv_cdf.back() <= table.hi);

  const auto normal = lzo::Distribution::normal(0, 1);
  const auto ntable = lzo::build_inverse_cdf_table(
      [&](double x) { return normal.pdf(x); }, -8.0, 8.0, 100000, "normal");
  // Quantile 0.8413 is the normal CDF at 1.
  const auto j = static_cast<std::size_t>(std::llround(0.8413 * (100000 - 1)));
  CHECK(ntable.inv_cdf[j] == doctest::Approx(1.0).epsilon(1e-3));

  CHECK_THROWS_AS(
      lzo::build_inverse_cdf_table([](double) { return 0.0; }, -1, 1, 2000, ""),
      lzo::DomainError);
  CHECK_THROWS_AS(
      lzo::build_inverse_cdf_table([](double) { return 1.0; }, -1, 1, 10, ""),
      lzo::ConfigError);
}

TEST_CASE("tabulated sampling matches the analytic law (KS)") {
  const auto normal = lzo::Distribution::normal(0, 1);
  const auto table = lzo::build_inverse_cdf_table(
      [&](double x) { return normal.pdf(x); }, -8.0, 8.0, 100000, "normal");
  const auto tab = lzo::Distribution::tabulated(table);
  CHECK(tab.is_even());

  lzo::RngStream rng(99);
  const int n = 1'000'000;
  std::vector<double> zs(n);
  tab.sample(rng, zs);
  std::sort(zs.begin(), zs.end());
  double ks = 0.0;
  for (int i = 0; i < n; ++i) {
    const double f = 0.5 * (1.0 + std::erf(zs[static_cast<std::size_t>(i)] /
                                           std::sqrt(2.0)));
    ks = std::max({ks, std::abs(f - static_cast<double>(i) / n),
                   std::abs(f - static_cast<double>(i + 1) / n)});
  }
  CHECK(ks < 0.01);

  // Tabulated pdf: linear interpolation inside, zero outside.
  CHECK(tab.pdf(0.0) == doctest::Approx(normal.pdf(0.0)).epsilon(1e-6));
  CHECK(tab.pdf(9.0) == 0.0);
}

TEST_CASE("table serialization round trip") {
  const auto normal = lzo::Distribution::normal(0, 1);
  const auto table = lzo::build_inverse_cdf_table(
      [&](double x) { return normal.pdf(x); }, -8.0, 8.0, 4096, "normal");
  const auto path =
      (std::filesystem::temp_directory_path() / "lzo_test_table.bin").string();
  lzo::save_table(table, path);
  const auto loaded = lzo::load_table(path);
  CHECK(loaded.lo == table.lo);
  CHECK(loaded.hi == table.hi);
  CHECK(loaded.grid_n == table.grid_n);
  CHECK(loaded.inv_cdf == table.inv_cdf);

  // Samplers are identical after the round trip.
  lzo::RngStream r1(5), r2(5);
  const auto d1 = lzo::Distribution::tabulated(table);
  const auto d2 = lzo::Distribution::tabulated(loaded);
  for (int i = 0; i < 1000; ++i) CHECK(d1.sample(r1) == d2.sample(r2));
  std::filesystem::remove(path);

  CHECK_THROWS_AS(lzo::load_table("/nonexistent/table.bin"), lzo::ParseError);
}

}  // namespace

// Copyright (c) 2026 The localzo authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>

#include <doctest.h>

#include "localzo/quadrature.hpp"
#include "localzo/rng.hpp"

namespace {

TEST_CASE("rng streams are deterministic and substreams are independent") {
  lzo::RngStream a(42), b(42);
  for (int i = 0; i < 1000; ++i) CHECK(a.next_u64() == b.next_u64());

  lzo::RngStream root(42);
  lzo::RngStream s1 = root.substream(1);
  lzo::RngStream s2 = root.substream(2);
  CHECK(s1.next_u64() != s2.next_u64());

  // Substreams depend on the root seed, not the stream position.
  lzo::RngStream c(42);
  c.next_u64();
  c.next_u64();
  lzo::RngStream s1_again = c.substream(1);
  lzo::RngStream s1_ref = lzo::RngStream(42).substream(1);
  CHECK(s1_again.next_u64() == s1_ref.next_u64());
}

TEST_CASE("uniform01 and normal have the right first moments") {
  lzo::RngStream rng(7);
  const int n = 200000;
  double su = 0, su2 = 0, sn = 0, sn2 = 0;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform01();
    su += u;
    su2 += u * u;
    const double z = rng.normal();
    sn += z;
    sn2 += z * z;
  }
  CHECK(su / n == doctest::Approx(0.5).epsilon(0.01));
  CHECK(su2 / n == doctest::Approx(1.0 / 3.0).epsilon(0.02));
  CHECK(sn / n == doctest::Approx(0.0).scale(1).epsilon(0.01));
  CHECK(sn2 / n == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("adaptive simpson integrates smooth functions to tolerance") {
  const double g = lzo::adaptive_simpson(
      [](double x) { return std::exp(-x * x / 2.0); }, -10.0, 10.0, 1e-10);
  CHECK(g == doctest::Approx(std::sqrt(2.0 * M_PI)).epsilon(1e-9));

  const double p = lzo::adaptive_simpson(
      [](double x) { return std::sin(x) * std::sin(x); }, 0.0, M_PI, 1e-10);
  CHECK(p == doctest::Approx(M_PI / 2.0).epsilon(1e-9));
}

}  // namespace

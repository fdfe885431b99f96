// Copyright (c) 2026 The localzo authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <cstdint>
#include <utility>

namespace lzo {

namespace detail {

template <class F>
double simpson_step(F& f, double a, double b, double fa, double fm, double fb,
                    double whole, double tol, int depth, std::int64_t& budget,
                    bool& converged) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  budget -= 2;
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (std::abs(delta) <= 15.0 * tol) {
    return left + right + delta / 15.0;
  }
  if (depth <= 0 || budget <= 0) {
    converged = false;
    return left + right + delta / 15.0;
  }
  return simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1, budget,
                      converged) +
         simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1,
                      budget, converged);
}

}  // namespace detail

struct QuadratureResult {
  double value;
  bool converged;
};

// Adaptive Simpson on [a, b]. All integrands in this toolkit are smooth away
// from finitely many points, so the refinement seeds the interval with a few
// panels before adapting. A global evaluation budget bounds the work on
// integrands that never settle (e.g. ones carrying finite-difference noise);
// hitting it clears the converged flag.
template <class F>
QuadratureResult adaptive_simpson_full(F&& f, double a, double b,
                                       double tol = 1e-9, int max_depth = 40,
                                       int initial_panels = 8,
                                       std::int64_t max_evals = 4'000'000) {
  if (a == b) return {0.0, true};
  bool converged = true;
  double total = 0.0;
  std::int64_t budget = max_evals;
  const double h = (b - a) / initial_panels;
  const double panel_tol = tol / initial_panels;
  for (int p = 0; p < initial_panels; ++p) {
    const double pa = a + p * h;
    const double pb = (p + 1 == initial_panels) ? b : pa + h;
    const double pm = 0.5 * (pa + pb);
    const double fa = f(pa);
    const double fm = f(pm);
    const double fb = f(pb);
    budget -= 3;
    const double whole = (pb - pa) / 6.0 * (fa + 4.0 * fm + fb);
    total += detail::simpson_step(f, pa, pb, fa, fm, fb, whole, panel_tol,
                                  max_depth, budget, converged);
  }
  return {total, converged};
}

template <class F>
double adaptive_simpson(F&& f, double a, double b, double tol = 1e-9,
                        int max_depth = 40) {
  return adaptive_simpson_full(std::forward<F>(f), a, b, tol, max_depth).value;
}

}  // namespace lzo

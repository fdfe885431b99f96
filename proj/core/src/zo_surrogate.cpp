// Copyright (c) 2026 The localzo authors
// SPDX-License-Identifier: Apache-2.0

#include "localzo/zo_surrogate.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "localzo/quadrature.hpp"

namespace lzo {

namespace {

constexpr double kSqrt2 = 1.4142135623730951;
constexpr double kSqrt3 = 1.7320508075688772;
constexpr double kSqrt2Pi = 2.5066282746310002;

// Reference value of the sigmoid shape integral, 4 significant digits.
constexpr double kSigmoidShapeRef = 0.4262;

std::atomic<std::uint64_t> g_degenerate_samples{0};

double ipow(double x, int n) {
  if (n == 1) return x;
  if (n == -1) return 1.0 / x;
  return std::pow(x, static_cast<double>(n));
}

// e^{-s}(1 - e^{-s}) / (s (1 + e^{-s})^3), continued by its limit 1/8 at 0.
double sigmoid_shape(double s) {
  if (s == 0.0) return 0.125;
  const double e = std::exp(-s);
  return e * (-std::expm1(-s)) / s / ((1.0 + e) * (1.0 + e) * (1.0 + e));
}

}  // namespace

void ZOConfig::validate() const {
  if (!(delta > 0.0)) throw ConfigError("ZOConfig: delta must be > 0");
  if (alpha == 0) throw ConfigError("ZOConfig: alpha must be a nonzero integer");
  if (m < 1) throw ConfigError("ZOConfig: m must be >= 1");
  if (!(scale > 0.0)) throw ConfigError("ZOConfig: scale must be > 0");
}

double g2_estimate(double u, double z, const ZOConfig& cfg) {
  const double az = std::abs(z);
  if (std::abs(u) > az * cfg.delta) return 0.0;
  if (az == 0.0 && cfg.alpha < 0) {
    g_degenerate_samples.fetch_add(1, std::memory_order_relaxed);
    return 0.0;
  }
  return ipow(az, cfg.alpha) / (2.0 * cfg.delta);
}

std::uint64_t degenerate_sample_count() {
  return g_degenerate_samples.load(std::memory_order_relaxed);
}

void reset_degenerate_sample_count() {
  g_degenerate_samples.store(0, std::memory_order_relaxed);
}

LocalZOGrad local_zo_grad(double u, const ZOConfig& cfg, RngStream& rng,
                          const Distribution& dist) {
  double sum = 0.0;
  for (int k = 0; k < cfg.m; ++k) {
    sum += g2_estimate(u, dist.sample(rng), cfg);
  }
  const double grad = cfg.scale * sum / static_cast<double>(cfg.m);
  return {grad, grad != 0.0};
}

double expected_surrogate(DistKind kind, double u, double delta) {
  const double r = std::abs(u) / delta;
  switch (kind) {
    case DistKind::kNormal:
      return std::exp(-0.5 * r * r) / (delta * kSqrt2Pi);
    case DistKind::kUniform:
      return r < kSqrt3 ? (3.0 - r * r) / (4.0 * kSqrt3 * delta) : 0.0;
    case DistKind::kLaplace:
      return (r + 1.0 / kSqrt2) * std::exp(-kSqrt2 * r) / (2.0 * delta);
    default:
      throw ConfigError("expected_surrogate: analytic kinds only");
  }
}

double SurrogateFn::operator()(double u) const { return surrogate_eval(*this, u); }

SurrogateFn SurrogateFn::sigmoid_grad(double k) {
  if (!(k > 0.0)) throw ConfigError("sigmoid_grad: k must be > 0");
  return {SurrogateKind::kSigmoidGrad, k};
}
SurrogateFn SurrogateFn::fast_sigmoid_grad(double k) {
  if (!(k > 0.0)) throw ConfigError("fast_sigmoid_grad: k must be > 0");
  return {SurrogateKind::kFastSigmoidGrad, k};
}
SurrogateFn SurrogateFn::expected_normal(double delta) {
  if (!(delta > 0.0)) throw ConfigError("expected_normal: delta must be > 0");
  return {SurrogateKind::kExpectedNormal, delta};
}
SurrogateFn SurrogateFn::expected_uniform(double delta) {
  if (!(delta > 0.0)) throw ConfigError("expected_uniform: delta must be > 0");
  return {SurrogateKind::kExpectedUniform, delta};
}
SurrogateFn SurrogateFn::expected_laplace(double delta) {
  if (!(delta > 0.0)) throw ConfigError("expected_laplace: delta must be > 0");
  return {SurrogateKind::kExpectedLaplace, delta};
}

std::string SurrogateFn::name() const {
  switch (kind) {
    case SurrogateKind::kSigmoidGrad:
      return "sigmoid_grad";
    case SurrogateKind::kFastSigmoidGrad:
      return "fast_sigmoid_grad";
    case SurrogateKind::kExpectedNormal:
      return "expected_normal";
    case SurrogateKind::kExpectedUniform:
      return "expected_uniform";
    case SurrogateKind::kExpectedLaplace:
      return "expected_laplace";
  }
  return "?";
}

double surrogate_eval(const SurrogateFn& g, double u) {
  switch (g.kind) {
    case SurrogateKind::kSigmoidGrad: {
      // Even in u; evaluate on |u| so the exponential never overflows.
      const double e = std::exp(-g.param * std::abs(u));
      return g.param * e / ((1.0 + e) * (1.0 + e));
    }
    case SurrogateKind::kFastSigmoidGrad: {
      const double d = 1.0 + g.param * std::abs(u);
      return 1.0 / (d * d);
    }
    case SurrogateKind::kExpectedNormal:
      return expected_surrogate(DistKind::kNormal, u, g.param);
    case SurrogateKind::kExpectedUniform:
      return expected_surrogate(DistKind::kUniform, u, g.param);
    case SurrogateKind::kExpectedLaplace:
      return expected_surrogate(DistKind::kLaplace, u, g.param);
  }
  return 0.0;
}

ValidityReport validate_surrogate(const std::function<double(double)>& g,
                                  std::span<const double> grid) {
  ValidityReport rep;
  for (double x : grid) {
    rep.evenness_max_dev =
        std::max(rep.evenness_max_dev, std::abs(g(x) - g(-x)));
  }
  std::vector<double> neg;
  for (double x : grid)
    if (x <= 0.0) neg.push_back(x);
  std::sort(neg.begin(), neg.end());
  for (std::size_t i = 1; i < neg.size(); ++i) {
    if (g(neg[i - 1]) > g(neg[i]) + 1e-12) ++rep.monotonicity_violations;
  }
  const double lo = grid.empty() ? -1.0 : *std::min_element(grid.begin(), grid.end());
  const double hi = grid.empty() ? 1.0 : *std::max_element(grid.begin(), grid.end());
  const auto q1 = adaptive_simpson_full(g, lo, hi, 1e-10);
  const auto q2 = adaptive_simpson_full(g, 2.0 * lo, 2.0 * hi, 1e-10);
  rep.integral_c = q2.value;
  rep.integral_converged = q1.converged && q2.converged &&
                           std::abs(q2.value - q1.value) <=
                               1e-6 * std::max(1.0, std::abs(q2.value)) + 1e-9;
  rep.even_ok = rep.evenness_max_dev <= 1e-12;
  rep.monotone_ok = rep.monotonicity_violations == 0;
  return rep;
}

ValidityReport validate_surrogate(const SurrogateFn& g,
                                  std::span<const double> grid) {
  auto fn = [&g](double u) { return surrogate_eval(g, u); };
  ValidityReport rep = validate_surrogate(std::function<double(double)>(fn), grid);

  // Integral over the whole line: quadrature window sized per kind, with an
  // analytic tail where the decay is only polynomial.
  double window;
  double tail = 0.0;
  switch (g.kind) {
    case SurrogateKind::kSigmoidGrad:
      window = 60.0 / g.param;
      break;
    case SurrogateKind::kFastSigmoidGrad:
      window = 1e4 / g.param;
      tail = 2.0 / (g.param * (1.0 + g.param * window));
      break;
    case SurrogateKind::kExpectedNormal:
      window = 10.0 * g.param;
      break;
    case SurrogateKind::kExpectedUniform:
      window = kSqrt3 * g.param;
      break;
    case SurrogateKind::kExpectedLaplace:
      window = 30.0 * g.param;
      break;
    default:
      window = grid.empty() ? 1.0 : std::abs(grid.back());
  }
  rep.integral_c = 2.0 * adaptive_simpson(fn, 0.0, window, 1e-12) + tail;
  rep.integral_converged = true;
  return rep;
}

double sigmoid_shape_integral() {
  static const double value = [] {
    const double v = 2.0 * adaptive_simpson(sigmoid_shape, 0.0, 120.0, 1e-13);
    if (std::abs(v - kSigmoidShapeRef) >= 1e-4) {
      throw std::logic_error(
          "sigmoid shape integral disagrees with its reference value");
    }
    return v;
  }();
  return value;
}

DerivedLambda derive_lambda(const SurrogateFn& g, int alpha, double delta) {
  if (!(delta > 0.0)) throw ConfigError("derive_lambda: delta must be > 0");
  if (alpha == 0) throw ConfigError("derive_lambda: alpha must be nonzero");

  DerivedLambda out;
  out.alpha = alpha;
  out.source = g;

  if (g.kind == SurrogateKind::kSigmoidGrad && alpha == 1) {
    const double k = g.param;
    const double shape = sigmoid_shape_integral();
    const double kd = k * delta;
    out.scale_c = delta * delta * k * k * shape;
    out.pdf = [shape, kd](double z) {
      return (1.0 / shape) * kd * sigmoid_shape(kd * std::abs(z));
    };
    const double a = std::sqrt(1.0 / shape);
    double w = 12.0 * a / kd;
    while (w > 1.0 && out.pdf(w) < 1e-15) w *= 0.9;
    out.default_support = w;
    return out;
  }

  if (g.kind == SurrogateKind::kFastSigmoidGrad && alpha == -1) {
    const double k = g.param;
    const double kd = k * delta;
    out.scale_c = 2.0 / k;
    out.pdf = [kd](double z) {
      const double az = std::abs(z);
      const double d = 1.0 + kd * az;
      return kd * kd * az / (d * d * d);
    };
    out.abs_quantile = [kd](double q) {
      const double s = std::sqrt(q);
      return s / ((1.0 - s) * kd);
    };
    out.default_support = 10.0;
    return out;
  }

  // Generic route: numeric derivative plus a window-doubling convergence
  // probe on the c-integral. The derivative carries finite-difference noise,
  // so the quadrature is a fixed composite Simpson rule in log space (which
  // also resolves any 1/z blow-up at the origin) rather than an adaptive one.
  auto gprime = [g](double x) {
    const double h = 1e-6 * std::max(1.0, std::abs(x));
    return (surrogate_eval(g, x + h) - surrogate_eval(g, x - h)) / (2.0 * h);
  };
  auto c_integrand = [&](double z) {
    return -gprime(z * delta) / ipow(z, alpha);
  };
  auto integrate_log = [&](double lo, double hi) {
    const int panels = 20000;  // even
    const double s0 = std::log(lo);
    const double s1 = std::log(hi);
    const double h = (s1 - s0) / panels;
    auto f = [&](double s) {
      const double z = std::exp(s);
      return c_integrand(z) * z;
    };
    double acc = f(s0) + f(s1);
    for (int i = 1; i < panels; ++i) acc += f(s0 + h * i) * (i % 2 ? 4.0 : 2.0);
    return acc * h / 3.0;
  };

  const double eps = 1e-9;
  double window = 1.0;
  double prev = 0.0;
  double value = 2.0 * delta * delta * integrate_log(eps, window);
  bool converged = false;
  for (int it = 0; it < 40; ++it) {
    const double wider = 2.0 * delta * delta * integrate_log(eps, 2.0 * window);
    if (std::abs(wider - value) <= 1e-6 * std::max(1e-30, std::abs(wider)) &&
        std::abs(value - prev) <= 1e-6 * std::max(1e-30, std::abs(value))) {
      converged = true;
      value = wider;
      break;
    }
    prev = value;
    value = wider;
    window *= 2.0;
  }
  // Inner-edge probe for alpha >= 1 where z^-alpha can blow up at 0.
  const double inner1 = 2.0 * delta * delta * integrate_log(1e-9, 1.0);
  const double inner2 = 2.0 * delta * delta * integrate_log(1e-12, 1.0);
  if (!converged ||
      std::abs(inner2 - inner1) > 1e-4 * std::max(1e-30, std::abs(value)) ||
      !(value > 0.0) || !std::isfinite(value)) {
    throw NonConvergenceError("derive_lambda: c-integral does not converge for (" +
                              g.name() + ", alpha=" + std::to_string(alpha) +
                              ")");
  }
  out.scale_c = value;
  const double c = value;
  out.pdf = [gprime, c, alpha, delta](double z) {
    const double az = std::abs(z);
    if (az == 0.0) {
      const double tiny = 1e-8;
      return -delta * delta * gprime(tiny * delta) / (c * ipow(tiny, alpha));
    }
    return -delta * delta * gprime(az * delta) / (c * ipow(az, alpha));
  };
  double w = 1.0;
  while (w < 1e6 && out.pdf(w) > 1e-15) w *= 2.0;
  out.default_support = w;
  return out;
}

double sample_derived_exact(const DerivedLambda& lambda, RngStream& rng) {
  if (!lambda.abs_quantile)
    throw ConfigError("sample_derived_exact: no closed-form quantile for " +
                      lambda.source.name());
  const double az = lambda.abs_quantile(rng.uniform01());
  return (rng.next_u64() & 1ULL) ? az : -az;
}

Distribution tabulate_derived(const DerivedLambda& lambda, double half_width,
                              std::int64_t grid_n) {
  return Distribution::tabulated(build_inverse_cdf_table(
      lambda.pdf, -half_width, half_width, grid_n,
      "derived:" + lambda.source.name()));
}

double check_thm_identity(const Distribution& dist,
                          std::span<const double> u_grid, double delta,
                          int alpha, std::int64_t draws, double fd_step,
                          RngStream& rng) {
  if (!dist.is_even())
    throw DomainError("identity check requires an even distribution");

  const double z_hi = dist.abs_quantile(1.0 - 1e-12);
  auto moment = [&](int power, double lo) {
    return adaptive_simpson(
        [&](double t) { return ipow(t, power) * dist.pdf(t); }, lo, z_hi,
        1e-11);
  };
  // Hypothesis probe: both int t^alpha and int t^{alpha+1} must be stable as
  // the inner cutoff shrinks (they diverge at 0 for alpha <= -1 when the PDF
  // does not vanish there).
  for (int power : {alpha, alpha + 1}) {
    const double a = moment(power, 1e-6);
    const double b = moment(power, 1e-9);
    if (std::abs(b - a) > 1e-3 * std::max(1.0, std::abs(b)))
      throw DomainError("identity check: moment integral diverges");
  }

  const double c_norm = 2.0 * moment(alpha + 1, 0.0);

  // lambda-tilde via a single reverse running integral of t^alpha pdf.
  const int fine_n = 200001;
  std::vector<double> xs(fine_n), tail(fine_n);
  for (int i = 0; i < fine_n; ++i)
    xs[i] = z_hi * static_cast<double>(i) / (fine_n - 1);
  tail[fine_n - 1] = 0.0;
  for (int i = fine_n - 2; i >= 0; --i) {
    const double fa = ipow(std::max(xs[i], 1e-300), alpha) * dist.pdf(xs[i]);
    const double fb =
        ipow(std::max(xs[i + 1], 1e-300), alpha) * dist.pdf(xs[i + 1]);
    tail[i] = tail[i + 1] + 0.5 * (xs[i + 1] - xs[i]) * (fa + fb);
  }
  auto tilde_pdf = [&](double z) {
    const double az = std::abs(z);
    if (az >= z_hi) return 0.0;
    const double f = az / z_hi * (fine_n - 1);
    const auto i = static_cast<std::size_t>(std::min(
        f, static_cast<double>(fine_n - 2)));
    const double w = f - static_cast<double>(i);
    return ((1.0 - w) * tail[i] + w * tail[i + 1]) / c_norm;
  };
  const Distribution tilde = Distribution::tabulated(build_inverse_cdf_table(
      tilde_pdf, -z_hi, z_hi, 100000, "tilde:" + dist.name()));

  std::vector<double> zs(static_cast<std::size_t>(draws));
  tilde.sample(rng, zs);
  std::sort(zs.begin(), zs.end());

  // d/du E[c h(u + delta z)] by central differences with common draws:
  // the difference quotient counts draws in (-(u+h)/d, -(u-h)/d].
  double max_err = 0.0;
  for (double u : u_grid) {
    const double lo = -(u + fd_step) / delta;
    const double hi = -(u - fd_step) / delta;
    const auto n_lo = std::upper_bound(zs.begin(), zs.end(), lo) - zs.begin();
    const auto n_hi = std::upper_bound(zs.begin(), zs.end(), hi) - zs.begin();
    const double fd = c_norm * static_cast<double>(n_hi - n_lo) /
                      (static_cast<double>(draws) * 2.0 * fd_step);
    const double rhs =
        (1.0 / delta) *
        adaptive_simpson(
            [&](double t) { return ipow(t, alpha) * dist.pdf(t); },
            std::min(std::abs(u) / delta, z_hi), z_hi, 1e-11);
    max_err = std::max(max_err, std::abs(fd - rhs));
  }
  return max_err;
}

}  // namespace lzo

// Copyright (c) 2026 The localzo authors
// SPDX-License-Identifier: Apache-2.0

#include "localzo/verify.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <vector>

#include "localzo/data.hpp"
#include "localzo/quadrature.hpp"
#include "localzo/snn.hpp"
#include "localzo/thresholds.hpp"

namespace lzo {

namespace {

constexpr double kSqrt3 = 1.7320508075688772;

std::vector<double> symmetric_grid(double half_width, int points) {
  std::vector<double> g(static_cast<std::size_t>(points));
  for (int i = 0; i < points; ++i)
    g[static_cast<std::size_t>(i)] =
        -half_width + 2.0 * half_width * i / (points - 1);
  return g;
}

// Means and standard errors of value(|z|) * 1(|z| >= r) for all grid
// thresholds at once, from one sorted draw set.
struct PrefixMc {
  std::vector<double> a;       // |z|, descending
  std::vector<double> pre_v;   // prefix sums of value
  std::vector<double> pre_v2;  // prefix sums of value^2

  void build(std::vector<double>&& abs_draws,
             const std::function<double(double)>& value) {
    a = std::move(abs_draws);
    std::sort(a.begin(), a.end(), std::greater<double>());
    pre_v.assign(a.size() + 1, 0.0);
    pre_v2.assign(a.size() + 1, 0.0);
    for (std::size_t i = 0; i < a.size(); ++i) {
      const double v = value(a[i]);
      pre_v[i + 1] = pre_v[i] + v;
      pre_v2[i + 1] = pre_v2[i] + v * v;
    }
  }

  // mean and SE of the gated value over all draws, gate |z| >= r (the
  // boundary counts as active).
  std::pair<double, double> mean_se(double r) const {
    const auto k = static_cast<std::size_t>(
        std::upper_bound(a.begin(), a.end(), r, std::greater<double>()) -
        a.begin());
    const double n = static_cast<double>(a.size());
    const double mean = pre_v[k] / n;
    const double var = std::max(0.0, pre_v2[k] / n - mean * mean);
    return {mean, std::sqrt(var / n)};
  }
};

McGridCompare grid_compare(const PrefixMc& mc, double delta,
                           const std::function<double(double)>& reference,
                           int grid_points) {
  McGridCompare out;
  out.grid_points = grid_points;
  for (double u : symmetric_grid(3.0 * delta, grid_points)) {
    const auto [mean, se] = mc.mean_se(std::abs(u) / delta);
    const double ref = reference(u);
    const double err = std::abs(mean - ref);
    out.worst_abs = std::max(out.worst_abs, err);
    if (se == 0.0) {
      if (err > 0.0) ++out.failures;
    } else {
      const double sigmas = err / se;
      out.worst_sigmas = std::max(out.worst_sigmas, sigmas);
      if (sigmas > 3.0) ++out.failures;
    }
  }
  return out;
}

}  // namespace

McGridCompare compare_g2_mc_to_expected(DistKind kind, double delta,
                                        std::int64_t draws, RngStream& rng,
                                        int grid_points) {
  const Distribution dist = Distribution::standard(kind);
  std::vector<double> abs_draws(static_cast<std::size_t>(draws));
  for (auto& v : abs_draws) v = std::abs(dist.sample(rng));
  PrefixMc mc;
  const double inv2d = 1.0 / (2.0 * delta);
  mc.build(std::move(abs_draws), [inv2d](double a) { return a * inv2d; });
  return grid_compare(
      mc, delta,
      [kind, delta](double u) { return expected_surrogate(kind, u, delta); },
      grid_points);
}

McGridCompare compare_roundtrip(const DerivedLambda& lambda, double delta,
                                std::int64_t draws, RngStream& rng,
                                int grid_points) {
  std::vector<double> abs_draws(static_cast<std::size_t>(draws));
  if (lambda.abs_quantile) {
    for (auto& v : abs_draws) v = lambda.abs_quantile(rng.uniform01());
  } else {
    const Distribution tab = tabulate_derived(lambda, lambda.default_support);
    for (auto& v : abs_draws) v = std::abs(tab.sample(rng));
  }
  PrefixMc mc;
  const double c = lambda.scale_c;
  const int alpha = lambda.alpha;
  const double inv2d = 1.0 / (2.0 * delta);
  mc.build(std::move(abs_draws), [c, alpha, inv2d](double a) {
    if (a == 0.0) return 0.0;  // degenerate draw, matches g2_estimate
    const double p = alpha == 1 ? a : (alpha == -1 ? 1.0 / a : std::pow(a, alpha));
    return c * p * inv2d;
  });
  const SurrogateFn src = lambda.source;
  return grid_compare(
      mc, delta, [src](double u) { return surrogate_eval(src, u); },
      grid_points);
}

double expected_surrogate_mass(DistKind kind, double delta) {
  double window;
  switch (kind) {
    case DistKind::kNormal:
      window = 12.0 * delta;
      break;
    case DistKind::kUniform:
      window = kSqrt3 * delta;
      break;
    default:
      window = 30.0 * delta;
      break;
  }
  return 2.0 * adaptive_simpson(
                   [&](double u) { return expected_surrogate(kind, u, delta); },
                   0.0, window, 1e-12);
}

namespace {

SpikeBatch random_spikes(int batch, int T, int d, int classes, double p,
                         RngStream& rng) {
  SpikeBatch b = SpikeBatch::zeros(batch, T, d, classes);
  for (auto& bit : b.bits) bit = rng.uniform01() < p ? 1 : 0;
  for (auto& l : b.labels)
    l = static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(classes)));
  return b;
}

SparseGradTape densify_tape(const SparseGradTape& tape) {
  SparseGradTape out = tape;
  out.dense = true;
  for (std::size_t l = 0; l < tape.entries.size(); ++l) {
    const int width = tape.layer_dims[l];
    for (std::size_t t = 0; t < tape.entries[l].size(); ++t) {
      const TapeLayer& src = tape.entries[l][t];
      TapeLayer dst;
      dst.col_ptr.assign(static_cast<std::size_t>(tape.batch) + 1, 0);
      dst.idx.reserve(static_cast<std::size_t>(width) * tape.batch);
      dst.val.assign(static_cast<std::size_t>(width) * tape.batch, 0.0);
      for (int b = 0; b < tape.batch; ++b) {
        for (int i = 0; i < width; ++i)
          dst.idx.push_back(static_cast<std::uint32_t>(i));
        for (std::uint32_t k = src.col_ptr[static_cast<std::size_t>(b)];
             k < src.col_ptr[static_cast<std::size_t>(b) + 1]; ++k)
          dst.val[static_cast<std::size_t>(b) * width + src.idx[k]] = src.val[k];
        dst.col_ptr[static_cast<std::size_t>(b) + 1] =
            static_cast<std::uint32_t>(dst.idx.size());
      }
      out.entries[l][t] = std::move(dst);
    }
  }
  return out;
}

double max_abs_diff(const std::vector<Eigen::MatrixXd>& a,
                    const std::vector<Eigen::MatrixXd>& b) {
  double worst = 0.0;
  for (std::size_t l = 0; l < a.size(); ++l)
    worst = std::max(worst, (a[l] - b[l]).cwiseAbs().maxCoeff());
  return worst;
}

double max_rel_diff(const std::vector<Eigen::MatrixXd>& a,
                    const std::vector<Eigen::MatrixXd>& b) {
  double worst = 0.0;
  for (std::size_t l = 0; l < a.size(); ++l)
    for (Eigen::Index i = 0; i < a[l].rows(); ++i)
      for (Eigen::Index j = 0; j < a[l].cols(); ++j) {
        const double x = a[l](i, j), y = b[l](i, j);
        const double denom = std::max({std::abs(x), std::abs(y), 1e-300});
        if (x != y) worst = std::max(worst, std::abs(x - y) / denom);
      }
  return worst;
}

}  // namespace

double check_gating_equivalence(std::uint64_t seed) {
  RngStream rng(seed);
  const std::vector<int> dims{6, 12, 10, 4};
  LifConfig lif;
  RngStream init = rng.substream(1);
  const LifNetwork net = LifNetwork::random(dims, lif, 2.0, init);
  RngStream data_rng = rng.substream(2);
  const SpikeBatch batch = random_spikes(5, 6, 6, 4, 0.4, data_rng);

  const SurrogateFn g = SurrogateFn::expected_normal(0.5);
  const double b_th = 0.8;
  RngStream fwd_rng = rng.substream(3);
  const ForwardRecord rec_sparse =
      forward(net, batch, BackwardMode::sparse_grad(g, b_th), fwd_rng);
  ForwardRecord rec_dense =
      forward(net, batch, BackwardMode::surrogate(g), fwd_rng);

  // Truncate the dense tape to the gated index set: zero everywhere the
  // sparse tape has no entry.
  for (std::size_t l = 0; l < rec_dense.tape.entries.size(); ++l) {
    const int width = rec_dense.tape.layer_dims[l];
    for (std::size_t t = 0; t < rec_dense.tape.entries[l].size(); ++t) {
      TapeLayer& dense = rec_dense.tape.entries[l][t];
      const TapeLayer& sparse = rec_sparse.tape.entries[l][t];
      std::vector<double> kept(static_cast<std::size_t>(width) * batch.batch, 0.0);
      for (int b = 0; b < batch.batch; ++b)
        for (std::uint32_t k = sparse.col_ptr[static_cast<std::size_t>(b)];
             k < sparse.col_ptr[static_cast<std::size_t>(b) + 1]; ++k)
          kept[static_cast<std::size_t>(b) * width + sparse.idx[k]] =
              sparse.val[k];
      for (int b = 0; b < batch.batch; ++b)
        for (std::uint32_t k = dense.col_ptr[static_cast<std::size_t>(b)];
             k < dense.col_ptr[static_cast<std::size_t>(b) + 1]; ++k)
          dense.val[k] = kept[static_cast<std::size_t>(b) * width + dense.idx[k]];
    }
  }

  const LossGrad a = loss_and_grad(rec_sparse, batch.labels, net);
  const LossGrad b = loss_and_grad(rec_dense, batch.labels, net);
  return max_abs_diff(a.weight_grads, b.weight_grads);
}

double check_dense_replay(std::uint64_t seed) {
  RngStream rng(seed);
  const std::vector<int> dims{6, 12, 10, 4};
  LifConfig lif;
  RngStream init = rng.substream(1);
  const LifNetwork net = LifNetwork::random(dims, lif, 2.0, init);
  RngStream data_rng = rng.substream(2);
  const SpikeBatch batch = random_spikes(5, 6, 6, 4, 0.4, data_rng);

  ZOConfig zo;
  zo.delta = 0.5;
  zo.m = 2;
  RngStream fwd_rng = rng.substream(3);
  ForwardRecord rec = forward(
      net, batch, BackwardMode::local_zo(Distribution::normal(0, 1), zo),
      fwd_rng);
  ForwardRecord replay = rec;
  replay.tape = densify_tape(rec.tape);

  const LossGrad a = loss_and_grad(rec, batch.labels, net);
  const LossGrad b = loss_and_grad(replay, batch.labels, net);
  return max_rel_diff(a.weight_grads, b.weight_grads);
}

ExpectationConsistency check_expectation_consistency(int reps,
                                                     std::uint64_t seed) {
  RngStream rng(seed);
  const std::vector<int> dims{4, 8, 2};
  const double delta = 0.5;
  LifConfig lif;
  RngStream init = rng.substream(1);
  const LifNetwork net = LifNetwork::random(dims, lif, 2.0, init);
  RngStream data_rng = rng.substream(2);
  const SpikeBatch batch = random_spikes(8, 5, 4, 2, 0.5, data_rng);

  RngStream fwd_rng = rng.substream(3);
  const ForwardRecord ref_rec = forward(
      net, batch, BackwardMode::surrogate(SurrogateFn::expected_normal(delta)),
      fwd_rng);
  const LossGrad ref = loss_and_grad(ref_rec, batch.labels, net);

  ZOConfig zo;
  zo.delta = delta;
  std::vector<Eigen::MatrixXd> sum(net.weights.size()), sumsq(net.weights.size());
  for (std::size_t l = 0; l < net.weights.size(); ++l) {
    sum[l].setZero(net.weights[l].rows(), net.weights[l].cols());
    sumsq[l].setZero(net.weights[l].rows(), net.weights[l].cols());
  }
  const BackwardMode mode =
      BackwardMode::local_zo(Distribution::normal(0, 1), zo);
  for (int r = 0; r < reps; ++r) {
    RngStream rep_rng = rng.substream(0x1000 + static_cast<std::uint64_t>(r));
    const ForwardRecord rec = forward(net, batch, mode, rep_rng);
    const LossGrad lg = loss_and_grad(rec, batch.labels, net);
    for (std::size_t l = 0; l < sum.size(); ++l) {
      sum[l] += lg.weight_grads[l];
      sumsq[l] += lg.weight_grads[l].cwiseProduct(lg.weight_grads[l]);
    }
  }

  ExpectationConsistency out;
  const double n = static_cast<double>(reps);
  for (std::size_t l = 0; l < sum.size(); ++l) {
    for (Eigen::Index i = 0; i < sum[l].rows(); ++i)
      for (Eigen::Index j = 0; j < sum[l].cols(); ++j) {
        ++out.coords;
        const double mean = sum[l](i, j) / n;
        const double var =
            std::max(0.0, sumsq[l](i, j) / n - mean * mean);
        const double se = std::sqrt(var / n);
        const double err = std::abs(mean - ref.weight_grads[l](i, j));
        if (se == 0.0) {
          if (err > 1e-12) ++out.failures;
        } else {
          const double sigmas = err / se;
          out.worst_sigmas = std::max(out.worst_sigmas, sigmas);
          if (sigmas > 3.0) ++out.failures;
        }
      }
  }
  return out;
}

double check_bptt_linearized_fd(std::uint64_t seed) {
  RngStream rng(seed);
  const std::vector<int> dims{4, 8, 2};
  LifConfig lif;
  RngStream init = rng.substream(1);
  LifNetwork net = LifNetwork::random(dims, lif, 2.0, init);
  RngStream data_rng = rng.substream(2);
  const SpikeBatch batch = random_spikes(6, 5, 4, 2, 0.5, data_rng);

  RngStream fwd_rng = rng.substream(3);
  const ForwardRecord rec = forward(
      net, batch, BackwardMode::surrogate(SurrogateFn::expected_normal(0.5)),
      fwd_rng);
  const LossGrad lg = loss_and_grad(rec, batch.labels, net);

  const int T = batch.T;
  const int B = batch.batch;
  const int H = net.hidden_layers();
  const int C = dims.back();

  // Baseline hidden potentials, recomputed with the replay's own arithmetic.
  std::vector<std::vector<Eigen::MatrixXd>> u_star(static_cast<std::size_t>(H));
  {
    std::vector<Eigen::MatrixXd> u(static_cast<std::size_t>(H));
    for (int l = 0; l < H; ++l) u[static_cast<std::size_t>(l)].setZero(dims[static_cast<std::size_t>(l) + 1], B);
    for (int t = 0; t < T; ++t) {
      for (int l = 0; l < H; ++l) {
        Eigen::MatrixXd in = net.weights[static_cast<std::size_t>(l)] *
                             rec.spikes[static_cast<std::size_t>(l)][static_cast<std::size_t>(t)];
        Eigen::MatrixXd x_prev =
            t > 0 ? rec.spikes[static_cast<std::size_t>(l) + 1][static_cast<std::size_t>(t) - 1]
                  : Eigen::MatrixXd::Zero(dims[static_cast<std::size_t>(l) + 1], B);
        u[static_cast<std::size_t>(l)] = net.lif.beta * u[static_cast<std::size_t>(l)] + in -
                                         net.lif.u_th * x_prev;
        u_star[static_cast<std::size_t>(l)].push_back(u[static_cast<std::size_t>(l)]);
      }
    }
  }

  // Forward replay with the Heaviside frozen to x* + g* (u - u*).
  auto replay_loss = [&](const std::vector<Eigen::MatrixXd>& W) {
    std::vector<Eigen::MatrixXd> u(static_cast<std::size_t>(H)),
        x_prev(static_cast<std::size_t>(H));
    for (int l = 0; l < H; ++l) {
      u[static_cast<std::size_t>(l)].setZero(dims[static_cast<std::size_t>(l) + 1], B);
      x_prev[static_cast<std::size_t>(l)].setZero(dims[static_cast<std::size_t>(l) + 1], B);
    }
    Eigen::MatrixXd uo = Eigen::MatrixXd::Zero(C, B);
    Eigen::MatrixXd M = Eigen::MatrixXd::Constant(
        C, B, -std::numeric_limits<double>::infinity());
    for (int t = 0; t < T; ++t) {
      Eigen::MatrixXd below = rec.spikes[0][static_cast<std::size_t>(t)];
      for (int l = 0; l < H; ++l) {
        auto& ul = u[static_cast<std::size_t>(l)];
        ul = net.lif.beta * ul + W[static_cast<std::size_t>(l)] * below -
             net.lif.u_th * x_prev[static_cast<std::size_t>(l)];
        const TapeLayer& tape =
            rec.tape.entries[static_cast<std::size_t>(l)][static_cast<std::size_t>(t)];
        Eigen::MatrixXd x =
            rec.spikes[static_cast<std::size_t>(l) + 1][static_cast<std::size_t>(t)];
        for (int b = 0; b < B; ++b)
          for (std::uint32_t k = tape.col_ptr[static_cast<std::size_t>(b)];
               k < tape.col_ptr[static_cast<std::size_t>(b) + 1]; ++k) {
            const int i = static_cast<int>(tape.idx[k]);
            x(i, b) += tape.val[k] *
                       (ul(i, b) -
                        u_star[static_cast<std::size_t>(l)][static_cast<std::size_t>(t)](i, b));
          }
        x_prev[static_cast<std::size_t>(l)] = x;
        below = std::move(x);
      }
      uo = net.lif.beta * uo + W.back() * below;
      M = M.cwiseMax(uo);
    }
    double loss = 0.0;
    for (int b = 0; b < B; ++b) {
      const double mx = M.col(b).maxCoeff();
      double z = 0.0;
      for (int c = 0; c < C; ++c) z += std::exp(M(c, b) - mx);
      loss -= M(batch.labels[static_cast<std::size_t>(b)], b) - (std::log(z) + mx);
    }
    return loss / static_cast<double>(B);
  };

  double worst = 0.0;
  std::vector<Eigen::MatrixXd> W = net.weights;
  for (std::size_t l = 0; l < W.size(); ++l) {
    for (Eigen::Index i = 0; i < W[l].rows(); ++i)
      for (Eigen::Index j = 0; j < W[l].cols(); ++j) {
        const double w0 = W[l](i, j);
        const double h = 1e-5 * std::max(1.0, std::abs(w0));
        W[l](i, j) = w0 + h;
        const double lp = replay_loss(W);
        W[l](i, j) = w0 - h;
        const double lm = replay_loss(W);
        W[l](i, j) = w0;
        const double fd = (lp - lm) / (2.0 * h);
        const double g = lg.weight_grads[l](i, j);
        const double rel =
            std::abs(fd - g) / std::max({std::abs(fd), std::abs(g), 1e-8});
        worst = std::max(worst, rel);
      }
  }
  return worst;
}

bool check_forward_determinism(std::uint64_t seed) {
  RngStream rng(seed);
  const std::vector<int> dims{6, 12, 10, 4};
  LifConfig lif;
  RngStream init = rng.substream(1);
  const LifNetwork net = LifNetwork::random(dims, lif, 2.0, init);
  RngStream data_rng = rng.substream(2);
  const SpikeBatch batch = random_spikes(5, 6, 6, 4, 0.4, data_rng);

  ZOConfig zo;
  zo.delta = 0.5;
  const BackwardMode mode =
      BackwardMode::local_zo(Distribution::normal(0, 1), zo);
  RngStream r1 = rng.substream(7);
  RngStream r2 = rng.substream(7);
  const ForwardRecord a = forward(net, batch, mode, r1);
  const ForwardRecord b = forward(net, batch, mode, r2);
  for (std::size_t l = 0; l < a.tape.entries.size(); ++l)
    for (std::size_t t = 0; t < a.tape.entries[l].size(); ++t) {
      if (a.tape.entries[l][t].idx != b.tape.entries[l][t].idx) return false;
      if (a.tape.entries[l][t].val != b.tape.entries[l][t].val) return false;
    }
  const LossGrad ga = loss_and_grad(a, batch.labels, net);
  const LossGrad gb = loss_and_grad(b, batch.labels, net);
  for (std::size_t l = 0; l < ga.weight_grads.size(); ++l)
    if ((ga.weight_grads[l].array() != gb.weight_grads[l].array()).any())
      return false;
  return true;
}

namespace {

struct Suite {
  std::vector<CheckResult> results;
  void add(const std::string& name, bool passed, const std::string& details) {
    results.push_back({name, passed, details});
  }
  template <class T>
  static std::string fmt(const char* label, T value, const char* extra = "") {
    std::ostringstream ss;
    ss << label << "=" << std::setprecision(8) << value << extra;
    return ss.str();
  }
};

}  // namespace

std::vector<CheckResult> run_verification(VerifyLevel level,
                                          std::uint64_t seed) {
  Suite suite;
  const bool full = level == VerifyLevel::kFull;
  const std::int64_t mc_draws = full ? 10'000'000 : 200'000;
  const std::int64_t identity_draws = full ? 10'000'000 : 1'000'000;
  const std::int64_t thresh_trials = full ? 10'000'000 : 200'000;
  const std::int64_t ks_draws = full ? 1'000'000 : 100'000;
  const int consistency_reps = full ? 10'000 : 1'500;
  RngStream rng(seed);

  // --- distributions ---
  const auto kinds = {DistKind::kNormal, DistKind::kUniform, DistKind::kLaplace};
  for (const auto kind : kinds) {
    const Distribution dist = Distribution::standard(kind);
    const double hi = dist.abs_quantile(1.0 - 1e-14);
    const double mass =
        2.0 * adaptive_simpson([&](double x) { return dist.pdf(x); }, 0.0, hi,
                               1e-10);
    suite.add("dist.normalization." + dist.name(), std::abs(mass - 1.0) < 1e-6,
              Suite::fmt("integral", mass));

    double even_dev = 0.0;
    for (double x : symmetric_grid(hi, 1001))
      even_dev = std::max(even_dev, std::abs(dist.pdf(x) - dist.pdf(-x)));
    suite.add("dist.evenness." + dist.name(), even_dev <= 1e-12,
              Suite::fmt("max_dev", even_dev));

    // |z|-CDF against the closed forms.
    double cdf_err = 0.0;
    for (double x : symmetric_grid(3.0, 301)) {
      if (x < 0) continue;
      double ref;
      switch (kind) {
        case DistKind::kNormal:
          ref = std::erf(x / std::sqrt(2.0));
          break;
        case DistKind::kUniform:
          ref = std::min(1.0, x / kSqrt3);
          break;
        default:
          ref = 1.0 - std::exp(-std::sqrt(2.0) * x);
          break;
      }
      cdf_err = std::max(cdf_err, std::abs(dist.abs_cdf(x) - ref));
    }
    suite.add("dist.abs_cdf." + dist.name(), cdf_err <= 1e-10,
              Suite::fmt("max_err", cdf_err));
  }

  {
    // Tabulated round trip: build from the normal PDF, sample, compare the
    // empirical CDF against erf.
    const Distribution normal = Distribution::normal(0, 1);
    const InverseCdfTable table = build_inverse_cdf_table(
        [&](double x) { return normal.pdf(x); }, -8.0, 8.0, 100000, "normal");
    const Distribution tab = Distribution::tabulated(table);
    const double tab_mass =
        2.0 * adaptive_simpson([&](double x) { return tab.pdf(x); }, 0.0, 8.0,
                               1e-8);
    suite.add("dist.normalization.tabulated", std::abs(tab_mass - 1.0) < 1e-4,
              Suite::fmt("integral", tab_mass));

    RngStream sub = rng.substream(11);
    std::vector<double> zs(static_cast<std::size_t>(ks_draws));
    tab.sample(sub, zs);
    std::sort(zs.begin(), zs.end());
    double ks = 0.0;
    for (std::size_t i = 0; i < zs.size(); ++i) {
      const double f = 0.5 * (1.0 + std::erf(zs[i] / std::sqrt(2.0)));
      const double lo = static_cast<double>(i) / static_cast<double>(zs.size());
      const double hi2 =
          static_cast<double>(i + 1) / static_cast<double>(zs.size());
      ks = std::max({ks, std::abs(f - lo), std::abs(f - hi2)});
    }
    suite.add("dist.table_sampling_ks", ks < 0.01, Suite::fmt("ks", ks));
  }

  // --- zeroth-order estimator and surrogates ---
  {
    const double shape = sigmoid_shape_integral();
    suite.add("zo.sigmoid_shape_constant", std::abs(shape - 0.4262) < 1e-4,
              Suite::fmt("integral", shape));
  }

  for (const auto kind : kinds) {
    const Distribution dist = Distribution::standard(kind);
    for (double delta : {0.05, 0.5, 1.0}) {
      RngStream sub = rng.substream(
          0x100 + static_cast<std::uint64_t>(kind) * 8 +
          static_cast<std::uint64_t>(delta * 20));
      const auto cmp = compare_g2_mc_to_expected(kind, delta, mc_draws, sub);
      std::ostringstream name;
      name << "zo.unbiasedness." << dist.name() << ".delta" << delta;
      suite.add(name.str(), cmp.failures == 0,
                Suite::fmt("worst_sigmas", cmp.worst_sigmas));

      const double mass = expected_surrogate_mass(kind, delta);
      std::ostringstream mname;
      mname << "zo.mass_identity." << dist.name() << ".delta" << delta;
      suite.add(mname.str(), std::abs(mass - 1.0) <= 1e-3,
                Suite::fmt("mass", mass));
    }

    // 1/delta shape at u = 0 (normal and uniform closed forms).
    if (kind != DistKind::kLaplace) {
      double worst = 0.0;
      const double base = expected_surrogate(kind, 0.0, 1.0);
      for (double delta : {0.25, 0.5, 1.0})
        worst = std::max(worst, std::abs(expected_surrogate(kind, 0.0, delta) *
                                             delta -
                                         base));
      suite.add("zo.delta_shape." + dist.name(), worst <= 1e-12,
                Suite::fmt("max_dev", worst));
    }

    const auto grid = symmetric_grid(5.0, 401);
    SurrogateFn g = kind == DistKind::kNormal
                        ? SurrogateFn::expected_normal(0.5)
                        : kind == DistKind::kUniform
                              ? SurrogateFn::expected_uniform(0.5)
                              : SurrogateFn::expected_laplace(0.5);
    const auto rep = validate_surrogate(g, grid);
    suite.add("zo.expected_is_surrogate." + dist.name(), rep.pass(),
              Suite::fmt("c", rep.integral_c));
  }

  {
    const double delta = 0.05;
    const double k = std::sqrt(1.0 / sigmoid_shape_integral()) / delta;
    const DerivedLambda sig = derive_lambda(SurrogateFn::sigmoid_grad(k), 1, delta);
    suite.add("zo.scale_c.sigmoid", std::abs(sig.scale_c - 1.0) <= 1e-3,
              Suite::fmt("c", sig.scale_c));

    const double p0 = sig.pdf(0.0);
    const double p1 = sig.pdf(1e-8);
    const double p2 = sig.pdf(1e-6);
    const double a2 = 1.0 / sigmoid_shape_integral();
    const bool limit_ok = std::abs(p1 - p2) <= 1e-6 * std::abs(p1) &&
                          std::abs(p0 - a2 * k * delta / 8.0) <=
                              1e-9 * std::abs(p0);
    suite.add("zo.sigmoid_lambda_origin_limit", limit_ok,
              Suite::fmt("pdf0", p0));

    RngStream sub = rng.substream(0x201);
    const auto cmp = compare_roundtrip(sig, delta, mc_draws, sub);
    suite.add("zo.roundtrip.sigmoid", cmp.failures == 0,
              Suite::fmt("worst_sigmas", cmp.worst_sigmas));

    const DerivedLambda fs =
        derive_lambda(SurrogateFn::fast_sigmoid_grad(100.0), -1, delta);
    suite.add("zo.scale_c.fastsigmoid", std::abs(fs.scale_c - 0.02) <= 1e-3,
              Suite::fmt("c", fs.scale_c));
    RngStream sub2 = rng.substream(0x202);
    const auto cmp2 = compare_roundtrip(fs, delta, mc_draws, sub2);
    suite.add("zo.roundtrip.fastsigmoid", cmp2.failures == 0,
              Suite::fmt("worst_sigmas", cmp2.worst_sigmas));

    // The round-trip comparison must notice a corrupted scaling constant.
    DerivedLambda tampered = sig;
    tampered.scale_c *= 1.02;
    RngStream sub3 = rng.substream(0x203);
    const auto cmp3 = compare_roundtrip(tampered, delta,
                                        std::min<std::int64_t>(mc_draws, 500'000),
                                        sub3);
    suite.add("zo.roundtrip_detects_tampered_scale", cmp3.failures > 0,
              Suite::fmt("failures", cmp3.failures));
  }

  {
    const auto grid = symmetric_grid(2.0, 21);
    for (const auto kind : kinds) {
      const Distribution dist = Distribution::standard(kind);
      RngStream sub =
          rng.substream(0x300 + static_cast<std::uint64_t>(kind));
      const double err =
          check_thm_identity(dist, grid, 0.5, 1, identity_draws, 1e-2, sub);
      suite.add("zo.heaviside_identity." + dist.name(), err < 5e-3,
                Suite::fmt("max_err", err));
    }
  }

  // --- thresholds ---
  {
    const struct {
      DistKind kind;
      int m;
      double expect;
    } cells[] = {
        {DistKind::kNormal, 1, 0.798},  {DistKind::kNormal, 5, 1.569},
        {DistKind::kUniform, 1, 0.866}, {DistKind::kUniform, 5, 1.443},
        {DistKind::kLaplace, 1, 0.707}, {DistKind::kLaplace, 5, 1.615},
    };
    bool all_ok = true;
    double worst = 0.0;
    for (const auto& cell : cells) {
      const Distribution dist = Distribution::standard(cell.kind);
      const double quad = expected_threshold({dist, cell.m, 1.0});
      worst = std::max(worst, std::abs(quad - cell.expect));
      if (std::abs(quad - cell.expect) > 1e-3) all_ok = false;

      RngStream sub = rng.substream(0x400 +
                                    static_cast<std::uint64_t>(cell.kind) * 16 +
                                    static_cast<std::uint64_t>(cell.m));
      const auto mc = empirical_threshold_stats(dist, cell.m, 1.0,
                                                thresh_trials, sub);
      const bool agree = std::abs(quad - mc.mean) <= 3.0 * mc.std_error;
      suite.add("thresholds.mc_agreement." + dist.name() + ".m" +
                    std::to_string(cell.m),
                agree, Suite::fmt("quad", quad, "") + " " +
                           Suite::fmt("mc", mc.mean));
    }
    suite.add("thresholds.reference_table", all_ok, Suite::fmt("worst", worst));

    double prev = 0.0;
    bool monotone = true;
    for (int m = 1; m <= 6; ++m) {
      const double v =
          expected_threshold({Distribution::standard(DistKind::kNormal), m, 1.0});
      if (v <= prev) monotone = false;
      prev = v;
    }
    suite.add("thresholds.monotone_in_m", monotone, "m=1..6");

    double scale_dev = 0.0;
    for (double delta : {0.05, 0.5, 2.0}) {
      const double v = expected_threshold(
          {Distribution::standard(DistKind::kLaplace), 3, delta});
      const double v1 = expected_threshold(
          {Distribution::standard(DistKind::kLaplace), 3, 1.0});
      scale_dev = std::max(scale_dev, std::abs(v - delta * v1));
    }
    suite.add("thresholds.delta_scaling", scale_dev <= 1e-12,
              Suite::fmt("max_dev", scale_dev));

    const double delta = 0.05;
    const double k = std::sqrt(1.0 / sigmoid_shape_integral()) / delta;
    const DerivedLambda sig = derive_lambda(SurrogateFn::sigmoid_grad(k), 1, delta);
    const auto sig_th = expected_threshold_tabulated(
        sig, -sig.default_support, sig.default_support, 1, delta);
    suite.add("thresholds.sigmoid_tabulated",
              std::abs(sig_th.value / delta - 0.766) <= 0.002,
              Suite::fmt("value_over_delta", sig_th.value / delta));

    const DerivedLambda fs =
        derive_lambda(SurrogateFn::fast_sigmoid_grad(100.0), -1, delta);
    const auto fs_th = expected_threshold_tabulated(fs, -10.0, 10.0, 1, delta);
    suite.add("thresholds.fastsigmoid_divergence_warning",
              fs_th.divergence_warning,
              Suite::fmt("value", fs_th.value, "") + " " +
                  Suite::fmt("doubled", fs_th.doubled_support_value));
  }

  // --- snn backward modes ---
  {
    const double gating = check_gating_equivalence(seed + 1);
    suite.add("snn.gating_equivalence", gating <= 1e-12,
              Suite::fmt("max_abs_diff", gating));

    const double replay = check_dense_replay(seed + 2);
    suite.add("snn.dense_replay", replay <= 1e-10,
              Suite::fmt("max_rel_diff", replay));

    const auto consistency =
        check_expectation_consistency(consistency_reps, seed + 3);
    suite.add("snn.expectation_consistency", consistency.failures == 0,
              Suite::fmt("worst_sigmas", consistency.worst_sigmas, "") + " " +
                  Suite::fmt("coords", consistency.coords));

    const double fd = check_bptt_linearized_fd(seed + 4);
    suite.add("snn.bptt_linearized_fd", fd <= 1e-4,
              Suite::fmt("max_rel_err", fd));

    suite.add("snn.determinism", check_forward_determinism(seed + 5), "");
  }

  // --- data ---
  {
    const SynthTaskSpec spec;
    const SynthTask task(spec, seed + 6);
    const SpikeBatch test = task.generate(512, seed + 7);
    // Nearest-template classification on first-spike-time vectors.
    int correct = 0;
    for (int s = 0; s < test.batch; ++s) {
      std::vector<double> ft(static_cast<std::size_t>(spec.d), -5.0);
      for (int j = 0; j < spec.d; ++j)
        for (int t = 0; t < spec.T; ++t)
          if (test.spike(s, t, j)) {
            ft[static_cast<std::size_t>(j)] = t;
            break;
          }
      int best = -1;
      double best_d = 0.0;
      for (int c = 0; c < spec.num_classes; ++c) {
        double dist2 = 0.0;
        for (int j = 0; j < spec.d; ++j) {
          const int tt = task.template_time(c, j);
          const double diff =
              ft[static_cast<std::size_t>(j)] - (tt < 0 ? -5.0 : tt);
          dist2 += diff * diff;
        }
        if (best < 0 || dist2 < best_d) {
          best = c;
          best_d = dist2;
        }
      }
      if (best == test.labels[static_cast<std::size_t>(s)]) ++correct;
    }
    const double acc = static_cast<double>(correct) / test.batch;
    suite.add("data.synth_separability", acc > 0.99, Suite::fmt("acc", acc));

    const SpikeBatch again = task.generate(512, seed + 7);
    suite.add("data.synth_reproducible",
              again.bits == test.bits && again.labels == test.labels, "");
  }

  return suite.results;
}

int print_verification(std::ostream& os, VerifyLevel level,
                       std::uint64_t seed) {
  const auto results = run_verification(level, seed);
  int failed = 0;
  for (const auto& r : results) {
    os << (r.passed ? "PASS" : "FAIL") << "  " << r.name;
    if (!r.details.empty()) os << "  (" << r.details << ")";
    os << "\n";
    if (!r.passed) ++failed;
  }
  os << results.size() - static_cast<std::size_t>(failed) << "/"
     << results.size() << " checks passed\n";
  return failed;
}

}  // namespace lzo

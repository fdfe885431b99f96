// Copyright (c) 2026 The localzo authors
// SPDX-License-Identifier: Apache-2.0

#include "localzo/snn.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstring>
#include <fstream>

namespace lzo {

namespace {

constexpr char kNetMagic[8] = {'L', 'Z', 'O', 'N', 'E', 'T', '1', '\0'};

// Dense (d x B) spike matrix for timestep t of the batch.
Eigen::MatrixXd spikes_at(const SpikeBatch& batch, int t) {
  Eigen::MatrixXd X(batch.d, batch.batch);
  for (int b = 0; b < batch.batch; ++b)
    for (int j = 0; j < batch.d; ++j)
      X(j, b) = batch.spike(b, t, j) ? 1.0 : 0.0;
  return X;
}

}  // namespace

void LifConfig::validate() const {
  if (!(beta > 0.0 && beta < 1.0))
    throw ConfigError("LifConfig: beta must be in (0, 1)");
  if (!(u_th > 0.0)) throw ConfigError("LifConfig: u_th must be > 0");
}

std::vector<int> LifNetwork::dims() const {
  std::vector<int> d;
  if (weights.empty()) return d;
  d.push_back(static_cast<int>(weights.front().cols()));
  for (const auto& W : weights) d.push_back(static_cast<int>(W.rows()));
  return d;
}

void LifNetwork::validate() const {
  lif.validate();
  if (weights.size() < 2)
    throw ConfigError("LifNetwork: needs at least one hidden layer and a readout");
  for (std::size_t l = 1; l < weights.size(); ++l)
    if (weights[l].cols() != weights[l - 1].rows())
      throw ConfigError("LifNetwork: adjacent layer dimensions do not conform");
  for (const auto& W : weights)
    if (!W.allFinite()) throw ConfigError("LifNetwork: non-finite weights");
}

LifNetwork LifNetwork::random(std::span<const int> dims, const LifConfig& lif,
                              double init_gain, RngStream& rng) {
  if (dims.size() < 3) throw ConfigError("LifNetwork::random: need >= 3 dims");
  LifNetwork net;
  net.lif = lif;
  net.lif.validate();
  for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
    if (dims[l] < 1 || dims[l + 1] < 1)
      throw ConfigError("LifNetwork::random: dims must be positive");
    Eigen::MatrixXd W(dims[l + 1], dims[l]);
    const double scale = init_gain * std::sqrt(3.0 / dims[l]);
    for (Eigen::Index j = 0; j < W.cols(); ++j)
      for (Eigen::Index i = 0; i < W.rows(); ++i)
        W(i, j) = rng.uniform(-scale, scale);
    net.weights.push_back(std::move(W));
  }
  return net;
}

BackwardMode BackwardMode::surrogate(SurrogateFn g) {
  BackwardMode m;
  m.kind = BackwardKind::kSurrogate;
  m.g = g;
  return m;
}

BackwardMode BackwardMode::sparse_grad(SurrogateFn g, double b_th) {
  if (!(b_th > 0.0)) throw ConfigError("sparse_grad: b_th must be > 0");
  BackwardMode m;
  m.kind = BackwardKind::kSparseGrad;
  m.g = g;
  m.b_th = b_th;
  return m;
}

BackwardMode BackwardMode::local_zo(Distribution dist, ZOConfig zo) {
  zo.validate();
  if (!dist.is_even())
    throw ConfigError("local_zo: sampling distribution must be even about 0");
  BackwardMode m;
  m.kind = BackwardKind::kLocalZO;
  m.dist = std::move(dist);
  m.zo = zo;
  return m;
}

std::int64_t SparseGradTape::nnz(int layer) const {
  std::int64_t n = 0;
  for (const auto& tl : entries[static_cast<std::size_t>(layer)])
    n += static_cast<std::int64_t>(tl.idx.size());
  return n;
}

double SparseGradTape::active_fraction(int layer) const {
  const double denom = static_cast<double>(batch) *
                       layer_dims[static_cast<std::size_t>(layer)] * T;
  return denom > 0 ? static_cast<double>(nnz(layer)) / denom : 0.0;
}

void lif_step(const Eigen::ArrayXd& u_prev, const Eigen::ArrayXd& x_prev,
              const Eigen::ArrayXd& input_current, const LifConfig& lif,
              Eigen::ArrayXd& u_out, Eigen::ArrayXd& x_out) {
  lif.validate();
  if (u_prev.size() != x_prev.size() || u_prev.size() != input_current.size())
    throw ConfigError("lif_step: array sizes do not conform");
  if (!u_prev.allFinite() || !x_prev.allFinite() || !input_current.allFinite())
    throw ConfigError("lif_step: non-finite inputs");
  if (((x_prev != 0.0) && (x_prev != 1.0)).any())
    throw ConfigError("lif_step: x_prev must be binary");
  u_out = lif.beta * u_prev + input_current - x_prev * lif.u_th;
  x_out = (u_out > lif.u_th).cast<double>();
}

ForwardRecord forward(const LifNetwork& net, const SpikeBatch& batch,
                      const BackwardMode& mode, RngStream& rng) {
  net.validate();
  const auto dims = net.dims();
  if (batch.d != dims.front())
    throw ConfigError("forward: input width does not match the network");
  if (batch.T < 1) throw ConfigError("forward: T must be >= 1");
  batch.validate();

  const int H = net.hidden_layers();
  const int B = batch.batch;
  const int T = batch.T;
  const int C = dims.back();
  const double u_th = net.lif.u_th;
  const double beta = net.lif.beta;

  ForwardRecord rec;
  rec.spikes.resize(static_cast<std::size_t>(H) + 1);
  for (auto& per_t : rec.spikes) per_t.reserve(static_cast<std::size_t>(T));
  rec.out_potentials.reserve(static_cast<std::size_t>(T));
  rec.spike_counts.assign(static_cast<std::size_t>(H) + 1, 0);
  rec.tape.T = T;
  rec.tape.batch = B;
  rec.tape.dense = mode.kind == BackwardKind::kSurrogate;
  rec.tape.layer_dims.assign(dims.begin() + 1, dims.end() - 1);
  rec.tape.entries.assign(static_cast<std::size_t>(H), {});
  for (auto& per_t : rec.tape.entries)
    per_t.resize(static_cast<std::size_t>(T));

  std::vector<Eigen::MatrixXd> u(static_cast<std::size_t>(H));
  std::vector<Eigen::MatrixXd> x_prev(static_cast<std::size_t>(H));
  for (int l = 0; l < H; ++l) {
    u[static_cast<std::size_t>(l)].setZero(dims[static_cast<std::size_t>(l) + 1], B);
    x_prev[static_cast<std::size_t>(l)].setZero(dims[static_cast<std::size_t>(l) + 1], B);
  }
  Eigen::MatrixXd u_out = Eigen::MatrixXd::Zero(C, B);
  Eigen::MatrixXd input;

  for (int t = 0; t < T; ++t) {
    rec.spikes[0].push_back(spikes_at(batch, t));
    for (int b = 0; b < B; ++b)
      rec.spike_counts[0] += static_cast<std::int64_t>(
          rec.spikes[0].back().col(b).sum());

    for (int l = 0; l < H; ++l) {
      const auto& W = net.weights[static_cast<std::size_t>(l)];
      const int d_out = dims[static_cast<std::size_t>(l) + 1];
      input.noalias() = W * rec.spikes[static_cast<std::size_t>(l)].back();
      rec.mac_forward += static_cast<std::int64_t>(W.rows()) * W.cols() * B;

      auto& ul = u[static_cast<std::size_t>(l)];
      auto& xp = x_prev[static_cast<std::size_t>(l)];
      ul = beta * ul + input - u_th * xp;
      if (!ul.allFinite()) throw ConfigError("forward: non-finite potentials");

      TapeLayer& tape = rec.tape.entries[static_cast<std::size_t>(l)]
                                        [static_cast<std::size_t>(t)];
      tape.col_ptr.assign(static_cast<std::size_t>(B) + 1, 0);
      if (mode.kind == BackwardKind::kSurrogate)
        tape.val.reserve(static_cast<std::size_t>(d_out) * B);

      Eigen::MatrixXd x(d_out, B);
      for (int b = 0; b < B; ++b) {
        RngStream neuron_rng(0);
        if (mode.kind == BackwardKind::kLocalZO) {
          const std::uint64_t tag =
              (static_cast<std::uint64_t>(l + 1) << 44) ^
              (static_cast<std::uint64_t>(t) << 24) ^
              static_cast<std::uint64_t>(b);
          neuron_rng = rng.substream(tag);
        }
        for (int i = 0; i < d_out; ++i) {
          const double v = ul(i, b) - u_th;
          x(i, b) = v > 0.0 ? 1.0 : 0.0;
          switch (mode.kind) {
            case BackwardKind::kSurrogate:
              tape.idx.push_back(static_cast<std::uint32_t>(i));
              tape.val.push_back(surrogate_eval(mode.g, v));
              break;
            case BackwardKind::kSparseGrad:
              if (std::abs(v) < mode.b_th) {
                const double g = surrogate_eval(mode.g, v);
                if (g != 0.0) {
                  tape.idx.push_back(static_cast<std::uint32_t>(i));
                  tape.val.push_back(g);
                }
              }
              break;
            case BackwardKind::kLocalZO: {
              const auto res =
                  local_zo_grad(v, mode.zo, neuron_rng, *mode.dist);
              if (res.active) {
                tape.idx.push_back(static_cast<std::uint32_t>(i));
                tape.val.push_back(res.grad);
              }
              break;
            }
          }
        }
        tape.col_ptr[static_cast<std::size_t>(b) + 1] =
            static_cast<std::uint32_t>(tape.idx.size());
      }
      rec.spike_counts[static_cast<std::size_t>(l) + 1] +=
          static_cast<std::int64_t>(x.sum());
      rec.spikes[static_cast<std::size_t>(l) + 1].push_back(std::move(x));
      xp = rec.spikes[static_cast<std::size_t>(l) + 1].back();
    }

    const auto& W_out = net.weights.back();
    u_out = beta * u_out;
    u_out.noalias() += W_out * rec.spikes[static_cast<std::size_t>(H)].back();
    rec.mac_forward += static_cast<std::int64_t>(W_out.rows()) * W_out.cols() * B;
    if (!u_out.allFinite()) throw ConfigError("forward: non-finite readout");
    rec.out_potentials.push_back(u_out);
  }
  return rec;
}

LossGrad loss_and_grad(const ForwardRecord& rec, std::span<const int> labels,
                       const LifNetwork& net) {
  const auto dims = net.dims();
  const int H = net.hidden_layers();
  const int T = rec.tape.T;
  const int B = rec.tape.batch;
  const int C = dims.back();
  const double beta = net.lif.beta;
  const double u_th = net.lif.u_th;
  if (static_cast<int>(labels.size()) != B)
    throw ConfigError("loss_and_grad: labels/batch mismatch");
  for (int l : labels)
    if (l < 0 || l >= C) throw ConfigError("loss_and_grad: label out of range");

  LossGrad out;
  out.weight_grads.resize(net.weights.size());
  for (std::size_t l = 0; l < net.weights.size(); ++l)
    out.weight_grads[l].setZero(net.weights[l].rows(), net.weights[l].cols());

  // Per-class max over time of readout potentials; ties resolve to the
  // earliest step.
  Eigen::MatrixXd M = rec.out_potentials.front();
  Eigen::MatrixXi am = Eigen::MatrixXi::Zero(C, B);
  for (int t = 1; t < T; ++t) {
    const auto& P = rec.out_potentials[static_cast<std::size_t>(t)];
    for (int b = 0; b < B; ++b)
      for (int c = 0; c < C; ++c)
        if (P(c, b) > M(c, b)) {
          M(c, b) = P(c, b);
          am(c, b) = t;
        }
  }

  Eigen::MatrixXd dM(C, B);
  double loss = 0.0;
  for (int b = 0; b < B; ++b) {
    const double mx = M.col(b).maxCoeff();
    double z = 0.0;
    for (int c = 0; c < C; ++c) z += std::exp(M(c, b) - mx);
    const double logz = std::log(z) + mx;
    loss -= (M(labels[static_cast<std::size_t>(b)], b) - logz);
    for (int c = 0; c < C; ++c) {
      dM(c, b) = std::exp(M(c, b) - logz) -
                 (c == labels[static_cast<std::size_t>(b)] ? 1.0 : 0.0);
      dM(c, b) /= static_cast<double>(B);
    }
  }
  out.loss = loss / static_cast<double>(B);

  const bool dense = rec.tape.dense;
  std::int64_t macs = 0;

  // Rolling dL/du per hidden layer; row sets only ever grow as t decreases,
  // so entries outside a layer's row set are exact zeros.
  std::vector<Eigen::MatrixXd> eu_curr(static_cast<std::size_t>(H)),
      eu_prev(static_cast<std::size_t>(H));
  std::vector<std::vector<std::vector<std::uint32_t>>> rows(
      static_cast<std::size_t>(H));
  for (int l = 0; l < H; ++l) {
    eu_curr[static_cast<std::size_t>(l)].setZero(dims[static_cast<std::size_t>(l) + 1], B);
    eu_prev[static_cast<std::size_t>(l)].setZero(dims[static_cast<std::size_t>(l) + 1], B);
    rows[static_cast<std::size_t>(l)].assign(static_cast<std::size_t>(B), {});
  }
  Eigen::MatrixXd euo_curr = Eigen::MatrixXd::Zero(C, B);
  Eigen::MatrixXd euo_prev = Eigen::MatrixXd::Zero(C, B);
  std::vector<std::uint32_t> merged;
  std::vector<std::uint32_t> spike_js;

  for (int t = T - 1; t >= 0; --t) {
    // Readout integrator: direct loss term at the argmax step plus leak.
    for (int b = 0; b < B; ++b)
      for (int c = 0; c < C; ++c) {
        double v = (am(c, b) == t) ? dM(c, b) : 0.0;
        if (t < T - 1) {
          v += beta * euo_prev(c, b);
          ++macs;
        }
        euo_curr(c, b) = v;
      }

    // Readout weight gradient against the top hidden layer's spikes.
    {
      const auto& X = rec.spikes[static_cast<std::size_t>(H)]
                                [static_cast<std::size_t>(t)];
      auto& dW = out.weight_grads.back();
      for (int b = 0; b < B; ++b) {
        if (dense) {
          for (int j = 0; j < static_cast<int>(X.rows()); ++j) {
            const double xv = X(j, b);
            for (int c = 0; c < C; ++c) dW(c, j) += euo_curr(c, b) * xv;
          }
          macs += static_cast<std::int64_t>(X.rows()) * C;
        } else {
          for (int j = 0; j < static_cast<int>(X.rows()); ++j) {
            if (X(j, b) == 0.0) continue;
            for (int c = 0; c < C; ++c) dW(c, j) += euo_curr(c, b);
            macs += C;
          }
        }
      }
    }

    for (int l = H - 1; l >= 0; --l) {
      const TapeLayer& tape = rec.tape.entries[static_cast<std::size_t>(l)]
                                              [static_cast<std::size_t>(t)];
      auto& eu = eu_curr[static_cast<std::size_t>(l)];
      auto& ep = eu_prev[static_cast<std::size_t>(l)];
      const bool top = (l == H - 1);
      const auto& W_above = net.weights[static_cast<std::size_t>(l) + 1];
      const Eigen::MatrixXd& eu_above =
          top ? euo_curr : eu_curr[static_cast<std::size_t>(l) + 1];

      for (int b = 0; b < B; ++b) {
        auto& row_list = rows[static_cast<std::size_t>(l)]
                             [static_cast<std::size_t>(b)];
        const std::uint32_t tb = tape.col_ptr[static_cast<std::size_t>(b)];
        const std::uint32_t te = tape.col_ptr[static_cast<std::size_t>(b) + 1];

        // Union of carried rows and this step's tape rows (both ascending).
        merged.clear();
        std::set_union(row_list.begin(), row_list.end(), tape.idx.begin() + tb,
                       tape.idx.begin() + te, std::back_inserter(merged));

        std::uint32_t k = tb;
        for (const std::uint32_t i : merged) {
          const double e_prev = ep(i, b);
          double v = beta * e_prev;
          ++macs;
          if (k < te && tape.idx[k] == i) {
            const double g = tape.val[k];
            ++k;
            // Gather dL/dx from the layer above, then route through the
            // spike derivative together with the reset-term contribution.
            double ex = 0.0;
            if (top) {
              for (int c = 0; c < C; ++c) ex += W_above(c, i) * eu_above(c, b);
              macs += C;
            } else {
              const auto& above_rows =
                  rows[static_cast<std::size_t>(l) + 1][static_cast<std::size_t>(b)];
              for (const std::uint32_t i2 : above_rows)
                ex += W_above(i2, i) * eu_above(i2, b);
              macs += static_cast<std::int64_t>(above_rows.size());
            }
            v += g * (ex - u_th * e_prev);
            macs += 2;
          }
          eu(i, b) = v;
        }
        row_list.swap(merged);

        // Weight gradient rows against the previous layer's spikes.
        const auto& X = rec.spikes[static_cast<std::size_t>(l)]
                                  [static_cast<std::size_t>(t)];
        auto& dW = out.weight_grads[static_cast<std::size_t>(l)];
        if (dense) {
          for (int j = 0; j < static_cast<int>(X.rows()); ++j) {
            const double xv = X(j, b);
            for (const std::uint32_t i : row_list) dW(i, j) += eu(i, b) * xv;
          }
          macs += static_cast<std::int64_t>(X.rows()) *
                  static_cast<std::int64_t>(row_list.size());
        } else {
          spike_js.clear();
          for (int j = 0; j < static_cast<int>(X.rows()); ++j)
            if (X(j, b) != 0.0) spike_js.push_back(static_cast<std::uint32_t>(j));
          for (const std::uint32_t j : spike_js)
            for (const std::uint32_t i : row_list) dW(i, j) += eu(i, b);
          macs += static_cast<std::int64_t>(spike_js.size()) *
                  static_cast<std::int64_t>(row_list.size());
        }
      }
    }

    std::swap(euo_curr, euo_prev);
    for (int l = 0; l < H; ++l)
      std::swap(eu_curr[static_cast<std::size_t>(l)],
                eu_prev[static_cast<std::size_t>(l)]);
  }

  out.mac_backward = macs;
  return out;
}

std::vector<int> predict(const LifNetwork& net, const SpikeBatch& batch) {
  net.validate();
  const auto dims = net.dims();
  if (batch.d != dims.front())
    throw ConfigError("predict: input width does not match the network");
  const int H = net.hidden_layers();
  const int B = batch.batch;
  const int C = dims.back();
  const double beta = net.lif.beta;
  const double u_th = net.lif.u_th;

  std::vector<Eigen::MatrixXd> u(static_cast<std::size_t>(H)),
      xp(static_cast<std::size_t>(H));
  for (int l = 0; l < H; ++l) {
    u[static_cast<std::size_t>(l)].setZero(dims[static_cast<std::size_t>(l) + 1], B);
    xp[static_cast<std::size_t>(l)].setZero(dims[static_cast<std::size_t>(l) + 1], B);
  }
  Eigen::MatrixXd u_out = Eigen::MatrixXd::Zero(C, B);
  Eigen::MatrixXd M = Eigen::MatrixXd::Constant(
      C, B, -std::numeric_limits<double>::infinity());
  Eigen::MatrixXd x, input;

  for (int t = 0; t < batch.T; ++t) {
    x = spikes_at(batch, t);
    for (int l = 0; l < H; ++l) {
      auto& ul = u[static_cast<std::size_t>(l)];
      input.noalias() = net.weights[static_cast<std::size_t>(l)] * x;
      ul = beta * ul + input - u_th * xp[static_cast<std::size_t>(l)];
      x = (ul.array() > u_th).cast<double>().matrix();
      xp[static_cast<std::size_t>(l)] = x;
    }
    u_out = beta * u_out;
    u_out.noalias() += net.weights.back() * x;
    M = M.cwiseMax(u_out);
  }

  std::vector<int> pred(static_cast<std::size_t>(B));
  for (int b = 0; b < B; ++b) {
    int best = 0;
    for (int c = 1; c < C; ++c)
      if (M(c, b) > M(best, b)) best = c;
    pred[static_cast<std::size_t>(b)] = best;
  }
  return pred;
}

double accuracy(const LifNetwork& net, const SpikeBatch& batch) {
  const auto pred = predict(net, batch);
  int correct = 0;
  for (int b = 0; b < batch.batch; ++b)
    if (pred[static_cast<std::size_t>(b)] == batch.labels[static_cast<std::size_t>(b)])
      ++correct;
  return batch.batch > 0 ? static_cast<double>(correct) / batch.batch : 0.0;
}

AdamState AdamState::init(const LifNetwork& net, double lr) {
  AdamState s;
  s.lr = lr;
  s.m.resize(net.weights.size());
  s.v.resize(net.weights.size());
  for (std::size_t l = 0; l < net.weights.size(); ++l) {
    s.m[l].setZero(net.weights[l].rows(), net.weights[l].cols());
    s.v[l].setZero(net.weights[l].rows(), net.weights[l].cols());
  }
  return s;
}

void AdamState::update(LifNetwork& net,
                       const std::vector<Eigen::MatrixXd>& grads) {
  if (grads.size() != net.weights.size())
    throw ConfigError("AdamState: gradient/weight count mismatch");
  ++step;
  const double bc1 = 1.0 - std::pow(beta1, static_cast<double>(step));
  const double bc2 = 1.0 - std::pow(beta2, static_cast<double>(step));
  for (std::size_t l = 0; l < net.weights.size(); ++l) {
    m[l] = beta1 * m[l] + (1.0 - beta1) * grads[l];
    v[l] = beta2 * v[l] + (1.0 - beta2) * grads[l].cwiseProduct(grads[l]);
    net.weights[l].array() -=
        lr * (m[l].array() / bc1) /
        ((v[l].array() / bc2).sqrt() + eps);
  }
}

StepMetrics train_step(LifNetwork& net, const SpikeBatch& batch,
                       const BackwardMode& mode, AdamState& opt,
                       RngStream& rng) {
  using clock = std::chrono::steady_clock;
  StepMetrics metrics;

  const auto t0 = clock::now();
  ForwardRecord rec = forward(net, batch, mode, rng);
  const auto t1 = clock::now();
  LossGrad lg = loss_and_grad(rec, batch.labels, net);
  const auto t2 = clock::now();

  metrics.loss = lg.loss;
  metrics.fwd_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
  metrics.bwd_ms = std::chrono::duration<double, std::milli>(t2 - t1).count();
  metrics.mac_forward = rec.mac_forward;
  metrics.mac_backward = lg.mac_backward;
  for (int l = 0; l < net.hidden_layers(); ++l)
    metrics.active_pct.push_back(100.0 * rec.tape.active_fraction(l));

  if (!std::isfinite(metrics.loss))
    throw TrainingError("train_step: loss diverged (NaN)", opt.step);
  opt.update(net, lg.weight_grads);
  return metrics;
}

void save_network(const std::string& path, const LifNetwork& net) {
  net.validate();
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("cannot open checkpoint for writing: " + path);
  out.write(kNetMagic, 7);
  const auto dims = net.dims();
  const std::uint64_t layers = net.weights.size();
  const std::uint64_t ndims = dims.size();
  out.write(reinterpret_cast<const char*>(&layers), 8);
  out.write(reinterpret_cast<const char*>(&ndims), 8);
  for (int d : dims) {
    const std::uint64_t v = static_cast<std::uint64_t>(d);
    out.write(reinterpret_cast<const char*>(&v), 8);
  }
  for (const auto& W : net.weights) {
    for (Eigen::Index i = 0; i < W.rows(); ++i)
      for (Eigen::Index j = 0; j < W.cols(); ++j) {
        const double v = W(i, j);
        out.write(reinterpret_cast<const char*>(&v), 8);
      }
  }
  out.write(reinterpret_cast<const char*>(&net.lif.beta), 8);
  out.write(reinterpret_cast<const char*>(&net.lif.u_th), 8);
  if (!out) throw ParseError("short write to checkpoint: " + path);
}

LifNetwork load_network(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open checkpoint: " + path);
  char magic[7];
  in.read(magic, 7);
  if (!in || std::memcmp(magic, kNetMagic, 7) != 0)
    throw ParseError("bad checkpoint magic in " + path);
  std::uint64_t layers = 0, ndims = 0;
  in.read(reinterpret_cast<char*>(&layers), 8);
  in.read(reinterpret_cast<char*>(&ndims), 8);
  if (!in || layers < 2 || ndims != layers + 1 || layers > 64)
    throw ParseError("bad checkpoint header in " + path);
  std::vector<std::uint64_t> dims(ndims);
  for (auto& d : dims) in.read(reinterpret_cast<char*>(&d), 8);
  LifNetwork net;
  for (std::uint64_t l = 0; l < layers; ++l) {
    Eigen::MatrixXd W(static_cast<Eigen::Index>(dims[l + 1]),
                      static_cast<Eigen::Index>(dims[l]));
    for (Eigen::Index i = 0; i < W.rows(); ++i)
      for (Eigen::Index j = 0; j < W.cols(); ++j)
        in.read(reinterpret_cast<char*>(&W(i, j)), 8);
    net.weights.push_back(std::move(W));
  }
  in.read(reinterpret_cast<char*>(&net.lif.beta), 8);
  in.read(reinterpret_cast<char*>(&net.lif.u_th), 8);
  if (!in) throw ParseError("truncated checkpoint: " + path);
  net.validate();
  return net;
}

}  // namespace lzo

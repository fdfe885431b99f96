// Copyright (c) 2026 The localzo authors
// SPDX-License-Identifier: Apache-2.0
//
// Discrete leaky integrate-and-fire network: forward pass with per-neuron
// gradient capture, and backpropagation-through-time with three
// interchangeable backward modes (dense surrogate, threshold-gated sparse,
// local zeroth-order).

#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "localzo/data.hpp"
#include "localzo/distributions.hpp"
#include "localzo/rng.hpp"
#include "localzo/zo_surrogate.hpp"

namespace lzo {

struct LifConfig {
  double beta = 0.9;  // leak factor, in (0, 1)
  double u_th = 1.0;  // threshold; reset is subtract-by-threshold

  void validate() const;
};

// Dense feedforward stack; the last weight matrix feeds a non-spiking leaky
// integrator readout (no reset, no Heaviside).
struct LifNetwork {
  std::vector<Eigen::MatrixXd> weights;  // weights[l]: dims[l+1] x dims[l]
  LifConfig lif;

  std::vector<int> dims() const;
  int hidden_layers() const { return static_cast<int>(weights.size()) - 1; }
  void validate() const;

  // Uniform(-1, 1) * gain * sqrt(3 / fan_in) per layer.
  static LifNetwork random(std::span<const int> dims, const LifConfig& lif,
                           double init_gain, RngStream& rng);
};

enum class BackwardKind { kSurrogate, kSparseGrad, kLocalZO };

struct BackwardMode {
  BackwardKind kind = BackwardKind::kSurrogate;
  SurrogateFn g{SurrogateKind::kExpectedNormal, 0.05};  // surrogate/sparsegrad
  double b_th = 0.0;                                    // sparsegrad gate
  std::optional<Distribution> dist;                     // localzo sampler
  ZOConfig zo;                                          // localzo estimator

  static BackwardMode surrogate(SurrogateFn g);
  static BackwardMode sparse_grad(SurrogateFn g, double b_th);
  static BackwardMode local_zo(Distribution dist, ZOConfig zo);
};

// Per-(layer, timestep) stored spike derivatives, compressed by batch column:
// entries of column b are idx[col_ptr[b] .. col_ptr[b+1]), neuron ids strictly
// ascending, values all nonzero (surrogate mode stores every neuron).
struct TapeLayer {
  std::vector<std::uint32_t> col_ptr;  // batch + 1
  std::vector<std::uint32_t> idx;
  std::vector<double> val;
};

struct SparseGradTape {
  int T = 0;
  int batch = 0;
  bool dense = false;
  std::vector<int> layer_dims;                  // hidden layer widths
  std::vector<std::vector<TapeLayer>> entries;  // [hidden layer][t]

  std::int64_t nnz(int layer) const;
  double active_fraction(int layer) const;
};

struct ForwardRecord {
  std::vector<Eigen::MatrixXd> out_potentials;            // T of (classes x B)
  std::vector<std::vector<Eigen::MatrixXd>> spikes;       // [layer 0..H][t]: d x B
  SparseGradTape tape;
  std::vector<std::int64_t> spike_counts;                 // per layer 0..H
  std::int64_t mac_forward = 0;
};

// One step of the membrane recurrence:
//   u = beta u_prev + input_current - x_prev u_th, spike where u > u_th.
void lif_step(const Eigen::ArrayXd& u_prev, const Eigen::ArrayXd& x_prev,
              const Eigen::ArrayXd& input_current, const LifConfig& lif,
              Eigen::ArrayXd& u_out, Eigen::ArrayXd& x_out);

// Runs the recurrence over layers and timesteps. At every hidden neuron the
// mode's gradient value at u - u_th is appended to the tape iff nonzero:
// surrogate always stores g(v); sparsegrad stores g(v) when |v| < b_th;
// localzo stores the scaled m-sample estimator value when active.
ForwardRecord forward(const LifNetwork& net, const SpikeBatch& batch,
                      const BackwardMode& mode, RngStream& rng);

struct LossGrad {
  double loss = 0.0;
  std::vector<Eigen::MatrixXd> weight_grads;
  std::int64_t mac_backward = 0;
};

// Softmax cross-entropy on per-class max-over-time readout potentials;
// BPTT with every dx/du replaced by the tape's stored value (0 if absent).
// Backward products touch only active tape rows and rows reached through the
// membrane recurrence; a dense tape reproduces the standard dense backward.
LossGrad loss_and_grad(const ForwardRecord& rec, std::span<const int> labels,
                       const LifNetwork& net);

// Readout potentials only (no tape); for evaluation.
std::vector<int> predict(const LifNetwork& net, const SpikeBatch& batch);
double accuracy(const LifNetwork& net, const SpikeBatch& batch);

struct AdamState {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  long step = 0;
  std::vector<Eigen::MatrixXd> m;
  std::vector<Eigen::MatrixXd> v;

  static AdamState init(const LifNetwork& net, double lr);
  void update(LifNetwork& net, const std::vector<Eigen::MatrixXd>& grads);
};

struct StepMetrics {
  double loss = 0.0;
  double fwd_ms = 0.0;
  double bwd_ms = 0.0;
  std::int64_t mac_forward = 0;
  std::int64_t mac_backward = 0;
  std::vector<double> active_pct;  // per hidden layer, in [0, 100]
};

// One forward/backward/optimizer update. Throws TrainingError on NaN loss,
// leaving weights at their last finite state.
StepMetrics train_step(LifNetwork& net, const SpikeBatch& batch,
                       const BackwardMode& mode, AdamState& opt,
                       RngStream& rng);

// Little-endian checkpoint: magic "LZONET1", layer count, dims, row-major
// f64 weights, then beta and u_th.
void save_network(const std::string& path, const LifNetwork& net);
LifNetwork load_network(const std::string& path);

}  // namespace lzo

// Copyright (c) 2026 The localzo authors
// SPDX-License-Identifier: Apache-2.0
//
// Backward-pass cost as a function of the gating threshold (active fraction).

#include <benchmark/benchmark.h>

#include "localzo/snn.hpp"

namespace {

struct Fixture {
  lzo::LifNetwork net;
  lzo::SpikeBatch batch;

  Fixture() {
    lzo::RngStream rng(42);
    lzo::LifConfig lif;
    lzo::RngStream init = rng.substream(1);
    net = lzo::LifNetwork::random(std::vector<int>{100, 200, 200, 10}, lif, 3.0,
                                  init);
    lzo::RngStream data_rng = rng.substream(2);
    batch = lzo::SpikeBatch::zeros(32, 50, 100, 10);
    for (auto& bit : batch.bits) bit = data_rng.uniform01() < 0.01 ? 1 : 0;
    for (auto& l : batch.labels)
      l = static_cast<int>(data_rng.uniform_index(10));
  }
};

Fixture& fixture() {
  static Fixture f;
  return f;
}

void BM_backward_dense(benchmark::State& state) {
  auto& f = fixture();
  lzo::RngStream rng(7);
  const auto rec = lzo::forward(
      f.net, f.batch,
      lzo::BackwardMode::surrogate(lzo::SurrogateFn::expected_normal(0.05)),
      rng);
  for (auto _ : state) {
    auto lg = lzo::loss_and_grad(rec, f.batch.labels, f.net);
    benchmark::DoNotOptimize(lg.loss);
    state.counters["mac"] = static_cast<double>(lg.mac_backward);
  }
}
BENCHMARK(BM_backward_dense)->Unit(benchmark::kMillisecond);

void BM_backward_sparse(benchmark::State& state) {
  auto& f = fixture();
  lzo::RngStream rng(7);
  // b_th sweeps the active fraction.
  const double b_th = 0.01 * static_cast<double>(state.range(0));
  const auto rec = lzo::forward(
      f.net, f.batch,
      lzo::BackwardMode::sparse_grad(lzo::SurrogateFn::expected_normal(0.05),
                                     b_th),
      rng);
  double active = 0.0;
  for (int l = 0; l < f.net.hidden_layers(); ++l)
    active += 100.0 * rec.tape.active_fraction(l) / f.net.hidden_layers();
  for (auto _ : state) {
    auto lg = lzo::loss_and_grad(rec, f.batch.labels, f.net);
    benchmark::DoNotOptimize(lg.loss);
    state.counters["mac"] = static_cast<double>(lg.mac_backward);
    state.counters["active_pct"] = active;
  }
}
BENCHMARK(BM_backward_sparse)->Arg(1)->Arg(5)->Arg(20)->Arg(100)
    ->Unit(benchmark::kMillisecond);

void BM_forward_localzo(benchmark::State& state) {
  auto& f = fixture();
  lzo::ZOConfig zo;
  zo.delta = 0.05;
  const auto mode =
      lzo::BackwardMode::local_zo(lzo::Distribution::normal(0, 1), zo);
  std::uint64_t i = 0;
  for (auto _ : state) {
    lzo::RngStream rng(i++);
    auto rec = lzo::forward(f.net, f.batch, mode, rng);
    benchmark::DoNotOptimize(rec.mac_forward);
  }
}
BENCHMARK(BM_forward_localzo)->Unit(benchmark::kMillisecond);

}  // namespace

// Copyright (c) 2026 The localzo authors
// SPDX-License-Identifier: Apache-2.0

#include <benchmark/benchmark.h>

#include "localzo/distributions.hpp"
#include "localzo/zo_surrogate.hpp"

namespace {

void BM_sample_analytic(benchmark::State& state) {
  const auto dist =
      lzo::Distribution::standard(static_cast<lzo::DistKind>(state.range(0)));
  lzo::RngStream rng(1);
  double acc = 0.0;
  for (auto _ : state) {
    acc += dist.sample(rng);
    benchmark::DoNotOptimize(acc);
  }
}
BENCHMARK(BM_sample_analytic)->Arg(0)->Arg(1)->Arg(2);

void BM_sample_tabulated(benchmark::State& state) {
  const double delta = 0.05;
  const double k = std::sqrt(1.0 / lzo::sigmoid_shape_integral()) / delta;
  const auto lam = lzo::derive_lambda(lzo::SurrogateFn::sigmoid_grad(k), 1, delta);
  const auto dist = lzo::tabulate_derived(lam, lam.default_support);
  lzo::RngStream rng(1);
  double acc = 0.0;
  for (auto _ : state) {
    acc += dist.sample(rng);
    benchmark::DoNotOptimize(acc);
  }
}
BENCHMARK(BM_sample_tabulated);

void BM_local_zo_grad(benchmark::State& state) {
  const auto dist = lzo::Distribution::normal(0, 1);
  lzo::ZOConfig zo;
  zo.delta = 0.05;
  zo.m = static_cast<int>(state.range(0));
  lzo::RngStream rng(1);
  double u = -0.2;
  for (auto _ : state) {
    u = -u;
    auto r = lzo::local_zo_grad(u, zo, rng, dist);
    benchmark::DoNotOptimize(r.grad);
  }
}
BENCHMARK(BM_local_zo_grad)->Arg(1)->Arg(5);

}  // namespace

// Copyright (c) 2026 The localzo authors
// SPDX-License-Identifier: Apache-2.0
//
// Spike-train data: dense binary batches, latency encoding of intensity
// vectors, a jittered-template synthetic classification task, and a CSV
// event-file loader/writer for externally produced recordings.

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "localzo/errors.hpp"
#include "localzo/rng.hpp"

namespace lzo {

// Incremental FNV-1a (64-bit), used for data-order and metrics digests.
struct Fnv1a64 {
  std::uint64_t state = 0xcbf29ce484222325ULL;
  void update(const void* data, std::size_t n) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
      state ^= p[i];
      state *= 0x100000001b3ULL;
    }
  }
  void update_u64(std::uint64_t v) { update(&v, sizeof v); }
  std::uint64_t digest() const { return state; }
};

// Dense binary spike tensor (batch x T x d) plus labels.
struct SpikeBatch {
  int batch = 0;
  int T = 0;
  int d = 0;
  int num_classes = 0;
  std::vector<std::uint8_t> bits;  // index ((b * T) + t) * d + j
  std::vector<int> labels;

  static SpikeBatch zeros(int batch, int T, int d, int num_classes);

  std::uint8_t spike(int b, int t, int j) const {
    return bits[(static_cast<std::size_t>(b) * T + t) * d + j];
  }
  void set_spike(int b, int t, int j, std::uint8_t v) {
    bits[(static_cast<std::size_t>(b) * T + t) * d + j] = v;
  }
  SpikeBatch slice(int begin, int count) const;
  void validate() const;  // binary entries, labels < num_classes
};

// Each neuron with intensity x_j > eps spikes exactly once at
// t = round((1 - x_j) (T - 1)); intensities at or below eps stay silent.
// Throws ConfigError for intensities outside [0, 1].
std::vector<std::uint8_t> latency_encode(std::span<const double> x, int T,
                                         double eps);

struct SynthTaskSpec {
  int num_classes = 10;
  int d = 100;
  int T = 50;
  double jitter_std = 1.0;
  double rate = 0.2;
};

// Per-class templates of spike times; samples jitter each template spike by
// rounded Gaussian noise clipped to [0, T). Fully determined by (spec, seed).
class SynthTask {
 public:
  SynthTask(const SynthTaskSpec& spec, std::uint64_t seed);

  // n samples with uniformly random labels, reproducible from stream_seed.
  SpikeBatch generate(int n, std::uint64_t stream_seed) const;

  const SynthTaskSpec& spec() const { return spec_; }
  // Template spike time of (class, neuron); -1 when the neuron is silent.
  int template_time(int cls, int j) const {
    return times_[static_cast<std::size_t>(cls) * spec_.d + j];
  }

 private:
  SynthTaskSpec spec_;
  std::vector<int> times_;  // -1 = no spike
};

// Single-consumer stream of shuffled mini-batches over a fixed dataset.
// Reshuffles at each epoch boundary from the stream seed; the digest hashes
// sample order and content in consumption order.
class BatchStream {
 public:
  BatchStream(SpikeBatch dataset, int batch_size, std::uint64_t seed);

  int batches_per_epoch() const;
  const SpikeBatch& dataset() const { return data_; }
  SpikeBatch next();
  std::uint64_t digest() const { return digest_.digest(); }

 private:
  void reshuffle();

  SpikeBatch data_;
  int batch_size_;
  RngStream rng_;
  std::vector<int> order_;
  int cursor_ = 0;
  Fnv1a64 digest_;
};

// Event CSV:
//   # lzo-events n_samples=N T_max=T d=D num_classes=C
//   # label <sample_id> <label>     (one per sample)
//   sample_id,label,time_step,neuron_id
//   0,3,12,45
// A trailing polarity column, if present, is ignored with a warning. Events
// with time_step >= T_max are dropped and counted. Throws ParseError with
// the offending line number for malformed rows and for neuron_id >= d.
SpikeBatch read_events(const std::string& path,
                       std::int64_t* dropped_events = nullptr);
void write_events(const std::string& path, const SpikeBatch& batch);

}  // namespace lzo

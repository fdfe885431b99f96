// Copyright (c) 2026 The localzo authors
// SPDX-License-Identifier: Apache-2.0

#include "localzo/data.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <numeric>
#include <sstream>

namespace lzo {

SpikeBatch SpikeBatch::zeros(int batch, int T, int d, int num_classes) {
  if (batch < 0 || T < 1 || d < 1 || num_classes < 1)
    throw ConfigError("SpikeBatch: bad dimensions");
  SpikeBatch b;
  b.batch = batch;
  b.T = T;
  b.d = d;
  b.num_classes = num_classes;
  b.bits.assign(static_cast<std::size_t>(batch) * T * d, 0);
  b.labels.assign(static_cast<std::size_t>(batch), 0);
  return b;
}

SpikeBatch SpikeBatch::slice(int begin, int count) const {
  if (begin < 0 || count < 0 || begin + count > batch)
    throw ConfigError("SpikeBatch::slice: out of range");
  SpikeBatch out = zeros(count, T, d, num_classes);
  const std::size_t stride = static_cast<std::size_t>(T) * d;
  std::copy_n(bits.begin() + static_cast<std::size_t>(begin) * stride,
              static_cast<std::size_t>(count) * stride, out.bits.begin());
  std::copy_n(labels.begin() + begin, count, out.labels.begin());
  return out;
}

void SpikeBatch::validate() const {
  if (bits.size() != static_cast<std::size_t>(batch) * T * d ||
      labels.size() != static_cast<std::size_t>(batch))
    throw ConfigError("SpikeBatch: inconsistent sizes");
  for (auto v : bits)
    if (v > 1) throw ConfigError("SpikeBatch: entries must be binary");
  for (auto l : labels)
    if (l < 0 || l >= num_classes)
      throw ConfigError("SpikeBatch: label out of range");
}

std::vector<std::uint8_t> latency_encode(std::span<const double> x, int T,
                                         double eps) {
  if (T < 2) throw ConfigError("latency_encode: T must be >= 2");
  if (!(eps >= 0.0 && eps < 1.0))
    throw ConfigError("latency_encode: eps must be in [0, 1)");
  const int d = static_cast<int>(x.size());
  std::vector<std::uint8_t> out(static_cast<std::size_t>(T) * d, 0);
  for (int j = 0; j < d; ++j) {
    const double v = x[j];
    if (!(v >= 0.0 && v <= 1.0))
      throw ConfigError("latency_encode: intensity outside [0, 1]");
    if (v <= eps) continue;
    const int t = static_cast<int>(std::lround((1.0 - v) * (T - 1)));
    out[static_cast<std::size_t>(t) * d + j] = 1;
  }
  return out;
}

SynthTask::SynthTask(const SynthTaskSpec& spec, std::uint64_t seed)
    : spec_(spec) {
  if (spec.num_classes < 2) throw ConfigError("synth task: num_classes >= 2");
  if (spec.d < 1 || spec.T < 1) throw ConfigError("synth task: bad dims");
  if (!(spec.rate >= 0.0 && spec.rate <= 1.0))
    throw ConfigError("synth task: rate in [0, 1]");
  if (!(spec.jitter_std >= 0.0))
    throw ConfigError("synth task: jitter_std >= 0");
  times_.assign(static_cast<std::size_t>(spec.num_classes) * spec.d, -1);
  RngStream rng = RngStream(seed).substream(0x7e6d);
  for (int c = 0; c < spec.num_classes; ++c) {
    for (int j = 0; j < spec.d; ++j) {
      if (rng.uniform01() < spec.rate) {
        times_[static_cast<std::size_t>(c) * spec.d + j] =
            static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(spec.T)));
      }
    }
  }
}

SpikeBatch SynthTask::generate(int n, std::uint64_t stream_seed) const {
  SpikeBatch out =
      SpikeBatch::zeros(n, spec_.T, spec_.d, spec_.num_classes);
  RngStream rng = RngStream(stream_seed).substream(0x5a3f);
  for (int s = 0; s < n; ++s) {
    const int c =
        static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(spec_.num_classes)));
    out.labels[s] = c;
    for (int j = 0; j < spec_.d; ++j) {
      const int t0 = template_time(c, j);
      if (t0 < 0) continue;
      int t = t0;
      if (spec_.jitter_std > 0.0) {
        t = static_cast<int>(std::lround(t0 + spec_.jitter_std * rng.normal()));
        t = std::clamp(t, 0, spec_.T - 1);
      }
      out.set_spike(s, t, j, 1);
    }
  }
  return out;
}

BatchStream::BatchStream(SpikeBatch dataset, int batch_size, std::uint64_t seed)
    : data_(std::move(dataset)),
      batch_size_(batch_size),
      rng_(RngStream(seed).substream(0xb47c)) {
  if (batch_size_ < 1) throw ConfigError("BatchStream: batch_size >= 1");
  order_.resize(static_cast<std::size_t>(data_.batch));
  std::iota(order_.begin(), order_.end(), 0);
  reshuffle();
}

int BatchStream::batches_per_epoch() const {
  return (data_.batch + batch_size_ - 1) / batch_size_;
}

void BatchStream::reshuffle() {
  // Fisher-Yates with the stream's own draws; deterministic per seed.
  for (std::size_t i = order_.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(rng_.uniform_index(i));
    std::swap(order_[i - 1], order_[j]);
  }
  cursor_ = 0;
}

SpikeBatch BatchStream::next() {
  if (cursor_ >= data_.batch) reshuffle();
  const int n = std::min(batch_size_, data_.batch - cursor_);
  SpikeBatch out = SpikeBatch::zeros(n, data_.T, data_.d, data_.num_classes);
  const std::size_t stride = static_cast<std::size_t>(data_.T) * data_.d;
  for (int i = 0; i < n; ++i) {
    const int src = order_[static_cast<std::size_t>(cursor_ + i)];
    std::copy_n(data_.bits.begin() + src * stride, stride,
                out.bits.begin() + i * stride);
    out.labels[i] = data_.labels[static_cast<std::size_t>(src)];
    digest_.update_u64(static_cast<std::uint64_t>(src));
    digest_.update(data_.bits.data() + src * stride, stride);
    digest_.update_u64(static_cast<std::uint64_t>(out.labels[i]));
  }
  cursor_ += n;
  return out;
}

namespace {

long parse_long_field(const std::string& field, int line_no,
                      const char* what) {
  std::size_t pos = 0;
  long v;
  try {
    v = std::stol(field, &pos);
  } catch (const std::exception&) {
    throw ParseError("events line " + std::to_string(line_no) +
                     ": bad " + what + " '" + field + "'");
  }
  if (pos != field.size())
    throw ParseError("events line " + std::to_string(line_no) + ": bad " +
                     what + " '" + field + "'");
  return v;
}

}  // namespace

SpikeBatch read_events(const std::string& path, std::int64_t* dropped_events) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open events file: " + path);

  std::string line;
  int line_no = 0;
  long n_samples = -1, t_max = -1, d = -1, num_classes = -1;

  // Metadata line.
  if (!std::getline(in, line)) throw ParseError("events file is empty: " + path);
  ++line_no;
  {
    std::istringstream ss(line);
    std::string tag, word;
    ss >> tag >> word;
    if (tag != "#" || word != "lzo-events")
      throw ParseError("events line 1: expected '# lzo-events ...' header");
    while (ss >> word) {
      const auto eq = word.find('=');
      if (eq == std::string::npos)
        throw ParseError("events line 1: bad header field '" + word + "'");
      const std::string key = word.substr(0, eq);
      const long value = parse_long_field(word.substr(eq + 1), 1, key.c_str());
      if (key == "n_samples") n_samples = value;
      else if (key == "T_max") t_max = value;
      else if (key == "d") d = value;
      else if (key == "num_classes") num_classes = value;
      else throw ParseError("events line 1: unknown header field '" + key + "'");
    }
  }
  if (t_max < 1 || d < 1 || num_classes < 1)
    throw ParseError("events header must declare T_max, d, num_classes");

  struct Ev {
    long sample, label, t, neuron;
  };
  std::vector<Ev> events;
  std::vector<std::pair<long, long>> label_rows;  // (sample, label)
  bool warned_polarity = false;
  bool saw_column_header = false;
  long max_sample = -1;

  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::istringstream ss(line);
      std::string tag, word;
      ss >> tag >> word;
      if (word == "label") {
        long s, l;
        if (!(ss >> s >> l))
          throw ParseError("events line " + std::to_string(line_no) +
                           ": bad label row");
        label_rows.emplace_back(s, l);
        max_sample = std::max(max_sample, s);
      }
      continue;
    }
    std::vector<std::string> fields;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (!saw_column_header) {
      if (fields.size() >= 4 && fields[0] == "sample_id") {
        saw_column_header = true;
        if (fields.size() > 4 && !warned_polarity) {
          std::cerr << "read_events: ignoring extra column(s) '" << fields[4]
                    << "' in " << path << "\n";
          warned_polarity = true;
        }
        continue;
      }
      throw ParseError("events line " + std::to_string(line_no) +
                       ": expected column header sample_id,label,time_step,neuron_id");
    }
    if (fields.size() < 4)
      throw ParseError("events line " + std::to_string(line_no) +
                       ": expected 4 comma-separated fields");
    if (fields.size() > 4 && !warned_polarity) {
      std::cerr << "read_events: ignoring extra column(s) in " << path << "\n";
      warned_polarity = true;
    }
    Ev ev{parse_long_field(fields[0], line_no, "sample_id"),
          parse_long_field(fields[1], line_no, "label"),
          parse_long_field(fields[2], line_no, "time_step"),
          parse_long_field(fields[3], line_no, "neuron_id")};
    if (ev.sample < 0 || ev.t < 0 || ev.neuron < 0 || ev.label < 0)
      throw ParseError("events line " + std::to_string(line_no) +
                       ": negative field");
    if (ev.neuron >= d)
      throw ParseError("events line " + std::to_string(line_no) +
                       ": neuron_id " + std::to_string(ev.neuron) +
                       " out of range (d=" + std::to_string(d) + ")");
    if (ev.label >= num_classes)
      throw ParseError("events line " + std::to_string(line_no) +
                       ": label out of range");
    max_sample = std::max(max_sample, ev.sample);
    events.push_back(ev);
  }

  const long n = n_samples >= 0 ? n_samples : max_sample + 1;
  if (max_sample >= n)
    throw ParseError("events file references sample_id beyond n_samples");

  SpikeBatch out = SpikeBatch::zeros(static_cast<int>(n), static_cast<int>(t_max),
                                     static_cast<int>(d),
                                     static_cast<int>(num_classes));
  for (const auto& [s, l] : label_rows) {
    if (s >= n || l < 0 || l >= num_classes)
      throw ParseError("label row out of range in " + path);
    out.labels[static_cast<std::size_t>(s)] = static_cast<int>(l);
  }
  std::int64_t dropped = 0;
  for (const auto& ev : events) {
    out.labels[static_cast<std::size_t>(ev.sample)] = static_cast<int>(ev.label);
    if (ev.t >= t_max) {
      ++dropped;
      continue;
    }
    out.set_spike(static_cast<int>(ev.sample), static_cast<int>(ev.t),
                  static_cast<int>(ev.neuron), 1);
  }
  if (dropped_events) *dropped_events = dropped;
  return out;
}

void write_events(const std::string& path, const SpikeBatch& batch) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot open events file for writing: " + path);
  out << "# lzo-events n_samples=" << batch.batch << " T_max=" << batch.T
      << " d=" << batch.d << " num_classes=" << batch.num_classes << "\n";
  for (int s = 0; s < batch.batch; ++s)
    out << "# label " << s << " " << batch.labels[static_cast<std::size_t>(s)]
        << "\n";
  out << "sample_id,label,time_step,neuron_id\n";
  for (int s = 0; s < batch.batch; ++s) {
    for (int t = 0; t < batch.T; ++t) {
      for (int j = 0; j < batch.d; ++j) {
        if (batch.spike(s, t, j)) {
          out << s << ',' << batch.labels[static_cast<std::size_t>(s)] << ','
              << t << ',' << j << "\n";
        }
      }
    }
  }
  if (!out) throw ParseError("short write to events file: " + path);
}

}  // namespace lzo

// Copyright (c) 2026 The localzo authors
// SPDX-License-Identifier: Apache-2.0

#include "localzo/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>

namespace lzo {

namespace {

constexpr double kSqrt3 = 1.7320508075688772;
constexpr double kInvSqrt2 = 0.7071067811865476;
constexpr char kTableMagic[8] = {'L', 'Z', 'O', 'T', 'B', 'L', '1', '\0'};

double normal_pdf(double mean, double sd, double x) {
  const double t = (x - mean) / sd;
  return std::exp(-0.5 * t * t) / (sd * std::sqrt(2.0 * M_PI));
}

double normal_cdf(double mean, double sd, double x) {
  return 0.5 * (1.0 + std::erf((x - mean) / (sd * std::sqrt(2.0))));
}

}  // namespace

InverseCdfTable build_inverse_cdf_table(const std::function<double(double)>& pdf,
                                        double lo, double hi,
                                        std::int64_t grid_n,
                                        std::string source_pdf_id) {
  if (!(lo < hi)) throw ConfigError("inverse-CDF table: requires lo < hi");
  if (grid_n < 1000)
    throw ConfigError("inverse-CDF table: grid_n must be >= 1000");

  InverseCdfTable table;
  table.lo = lo;
  table.hi = hi;
  table.grid_n = grid_n;
  table.source_pdf_id = std::move(source_pdf_id);
  table.pdf_vals.resize(static_cast<std::size_t>(grid_n));
  table.cdf_vals.resize(static_cast<std::size_t>(grid_n));

  const double h = (hi - lo) / static_cast<double>(grid_n - 1);
  for (std::int64_t i = 0; i < grid_n; ++i) {
    const double v = pdf(table.grid_x(i));
    if (!(v >= 0.0) || !std::isfinite(v))
      throw DomainError("inverse-CDF table: PDF must be finite and >= 0");
    table.pdf_vals[static_cast<std::size_t>(i)] = v;
  }

  // Running trapezoid sum, renormalized so the CDF ends at exactly 1.
  double acc = 0.0;
  table.cdf_vals[0] = 0.0;
  for (std::int64_t i = 1; i < grid_n; ++i) {
    acc += 0.5 * h *
           (table.pdf_vals[static_cast<std::size_t>(i - 1)] +
            table.pdf_vals[static_cast<std::size_t>(i)]);
    table.cdf_vals[static_cast<std::size_t>(i)] = acc;
  }
  if (acc < 1e-12)
    throw DomainError("inverse-CDF table: degenerate PDF (integral < 1e-12)");
  for (auto& c : table.cdf_vals) c /= acc;
  table.cdf_vals.back() = 1.0;
  for (auto& p : table.pdf_vals) p /= acc;

  table.inv_cdf.resize(static_cast<std::size_t>(grid_n));
  std::size_t i = 0;
  for (std::int64_t j = 0; j < grid_n; ++j) {
    const double q =
        static_cast<double>(j) / static_cast<double>(grid_n - 1);
    while (i + 1 < table.cdf_vals.size() && table.cdf_vals[i + 1] < q) ++i;
    // q lies in [cdf[i], cdf[i+1]]; interpolate, taking the left edge of any
    // flat segment.
    if (j == grid_n - 1) {
      table.inv_cdf[static_cast<std::size_t>(j)] = hi;
      continue;
    }
    const double c0 = table.cdf_vals[i];
    const double c1 = table.cdf_vals[i + 1];
    const double x0 = table.grid_x(static_cast<std::int64_t>(i));
    double x = x0;
    if (c1 > c0 && q > c0) x = x0 + h * (q - c0) / (c1 - c0);
    table.inv_cdf[static_cast<std::size_t>(j)] = std::min(x, hi);
  }
  return table;
}

void save_table(const InverseCdfTable& table, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("cannot open table file for writing: " + path);
  out.write(kTableMagic, 7);
  auto put = [&out](const void* p, std::size_t n) {
    out.write(static_cast<const char*>(p), static_cast<std::streamsize>(n));
  };
  put(&table.lo, 8);
  put(&table.hi, 8);
  const std::uint64_t n = static_cast<std::uint64_t>(table.grid_n);
  put(&n, 8);
  put(table.inv_cdf.data(), table.inv_cdf.size() * 8);
  if (!out) throw ParseError("short write to table file: " + path);
}

InverseCdfTable load_table(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open table file: " + path);
  char magic[7];
  in.read(magic, 7);
  if (!in || std::memcmp(magic, kTableMagic, 7) != 0)
    throw ParseError("bad table magic in " + path);
  InverseCdfTable table;
  std::uint64_t n = 0;
  in.read(reinterpret_cast<char*>(&table.lo), 8);
  in.read(reinterpret_cast<char*>(&table.hi), 8);
  in.read(reinterpret_cast<char*>(&n), 8);
  if (!in || n < 2 || n > (1ULL << 32))
    throw ParseError("bad table header in " + path);
  table.grid_n = static_cast<std::int64_t>(n);
  table.inv_cdf.resize(n);
  in.read(reinterpret_cast<char*>(table.inv_cdf.data()),
          static_cast<std::streamsize>(n * 8));
  if (!in) throw ParseError("truncated table file: " + path);
  table.source_pdf_id = "loaded:" + path;

  // Reconstruct CDF/PDF grids from the quantile table: the empirical CDF at a
  // grid point x is the fraction of quantiles mapping below x.
  table.cdf_vals.resize(n);
  table.pdf_vals.resize(n);
  for (std::uint64_t i = 0; i < n; ++i) {
    const double x = table.grid_x(static_cast<std::int64_t>(i));
    const auto it =
        std::upper_bound(table.inv_cdf.begin(), table.inv_cdf.end(), x);
    const double idx =
        static_cast<double>(std::distance(table.inv_cdf.begin(), it));
    table.cdf_vals[i] = std::min(1.0, idx / static_cast<double>(n - 1));
  }
  const double h = (table.hi - table.lo) / static_cast<double>(n - 1);
  for (std::uint64_t i = 0; i < n; ++i) {
    const std::uint64_t a = (i == 0) ? 0 : i - 1;
    const std::uint64_t b = (i + 1 == n) ? i : i + 1;
    table.pdf_vals[i] =
        (table.cdf_vals[b] - table.cdf_vals[a]) / (h * static_cast<double>(b - a));
  }
  return table;
}

Distribution Distribution::normal(double mean, double stddev) {
  if (!(stddev > 0.0)) throw ConfigError("Normal requires std > 0");
  return Distribution(DistKind::kNormal, mean, stddev, "normal");
}

Distribution Distribution::uniform(double a, double b) {
  if (!(a < b)) throw ConfigError("Uniform requires a < b");
  return Distribution(DistKind::kUniform, a, b, "uniform");
}

Distribution Distribution::laplace(double mu, double b) {
  if (!(b > 0.0)) throw ConfigError("Laplace requires b > 0");
  return Distribution(DistKind::kLaplace, mu, b, "laplace");
}

Distribution Distribution::tabulated(InverseCdfTable table) {
  if (table.inv_cdf.empty())
    throw ConfigError("tabulated distribution requires a built table");
  Distribution d(DistKind::kTabulated, table.lo, table.hi,
                 table.source_pdf_id.empty() ? "tabulated"
                                             : table.source_pdf_id);
  d.table_ = std::make_shared<InverseCdfTable>(std::move(table));
  return d;
}

Distribution Distribution::standard(DistKind kind) {
  switch (kind) {
    case DistKind::kNormal:
      return normal(0.0, 1.0);
    case DistKind::kUniform:
      return uniform(-kSqrt3, kSqrt3);
    case DistKind::kLaplace:
      return laplace(0.0, kInvSqrt2);
    default:
      throw ConfigError("standard(): analytic kinds only");
  }
}

double Distribution::pdf(double x) const {
  switch (kind_) {
    case DistKind::kNormal:
      return normal_pdf(p0_, p1_, x);
    case DistKind::kUniform:
      return (x >= p0_ && x <= p1_) ? 1.0 / (p1_ - p0_) : 0.0;
    case DistKind::kLaplace:
      return std::exp(-std::abs(x - p0_) / p1_) / (2.0 * p1_);
    case DistKind::kTabulated: {
      const auto& t = *table_;
      if (x < t.lo || x > t.hi) return 0.0;
      const double h = (t.hi - t.lo) / static_cast<double>(t.grid_n - 1);
      const double fi = (x - t.lo) / h;
      const auto i = static_cast<std::size_t>(
          std::min<double>(fi, static_cast<double>(t.grid_n - 2)));
      const double w = fi - static_cast<double>(i);
      return (1.0 - w) * t.pdf_vals[i] + w * t.pdf_vals[i + 1];
    }
  }
  return 0.0;
}

double Distribution::cdf(double x) const {
  switch (kind_) {
    case DistKind::kNormal:
      return normal_cdf(p0_, p1_, x);
    case DistKind::kUniform:
      if (x <= p0_) return 0.0;
      if (x >= p1_) return 1.0;
      return (x - p0_) / (p1_ - p0_);
    case DistKind::kLaplace: {
      const double t = (x - p0_) / p1_;
      return t < 0.0 ? 0.5 * std::exp(t) : 1.0 - 0.5 * std::exp(-t);
    }
    case DistKind::kTabulated: {
      const auto& t = *table_;
      if (x <= t.lo) return 0.0;
      if (x >= t.hi) return 1.0;
      const double h = (t.hi - t.lo) / static_cast<double>(t.grid_n - 1);
      const double fi = (x - t.lo) / h;
      const auto i = static_cast<std::size_t>(
          std::min<double>(fi, static_cast<double>(t.grid_n - 2)));
      const double w = fi - static_cast<double>(i);
      return (1.0 - w) * t.cdf_vals[i] + w * t.cdf_vals[i + 1];
    }
  }
  return 0.0;
}

double Distribution::abs_cdf(double x) const {
  if (!is_even())
    throw DomainError("abs_cdf requires a distribution even about 0");
  if (x < 0.0) return 0.0;
  return std::clamp(2.0 * (cdf(x) - cdf(0.0)), 0.0, 1.0);
}

double Distribution::sample(RngStream& rng) const {
  switch (kind_) {
    case DistKind::kNormal:
      return p0_ + p1_ * rng.normal();
    case DistKind::kUniform:
      return rng.uniform(p0_, p1_);
    case DistKind::kLaplace: {
      const double u = rng.uniform01() - 0.5;
      const double s = u < 0.0 ? -1.0 : 1.0;
      return p0_ - p1_ * s * std::log1p(-2.0 * std::abs(u));
    }
    case DistKind::kTabulated: {
      // Nearest-index lookup into the quantile list.
      const auto& t = *table_;
      const double r = rng.uniform01();
      const auto j = static_cast<std::size_t>(
          std::llround(r * static_cast<double>(t.grid_n - 1)));
      return t.inv_cdf[j];
    }
  }
  return 0.0;
}

void Distribution::sample(RngStream& rng, std::span<double> out) const {
  for (auto& v : out) v = sample(rng);
}

bool Distribution::is_even(double tol) const {
  switch (kind_) {
    case DistKind::kNormal:
      return std::abs(p0_) <= tol;
    case DistKind::kUniform:
      return std::abs(p0_ + p1_) <= tol;
    case DistKind::kLaplace:
      return std::abs(p0_) <= tol;
    case DistKind::kTabulated: {
      const auto& t = *table_;
      if (std::abs(t.lo + t.hi) > tol) return false;
      const std::size_t n = t.pdf_vals.size();
      const std::size_t stride = std::max<std::size_t>(1, n / 1001);
      double scale = 0.0;
      for (std::size_t i = 0; i < n; i += stride)
        scale = std::max(scale, std::abs(t.pdf_vals[i]));
      if (scale == 0.0) return true;
      for (std::size_t i = 0; i < n; i += stride) {
        const double d = std::abs(t.pdf_vals[i] - t.pdf_vals[n - 1 - i]);
        if (d > 1e-9 * scale) return false;
      }
      return true;
    }
  }
  return false;
}

std::pair<double, double> Distribution::support() const {
  constexpr double inf = std::numeric_limits<double>::infinity();
  switch (kind_) {
    case DistKind::kNormal:
      return {-inf, inf};
    case DistKind::kUniform:
      return {p0_, p1_};
    case DistKind::kLaplace:
      return {-inf, inf};
    case DistKind::kTabulated:
      return {table_->lo, table_->hi};
  }
  return {-inf, inf};
}

double Distribution::abs_quantile(double p) const {
  if (!(p >= 0.0 && p < 1.0))
    throw ConfigError("abs_quantile requires p in [0, 1)");
  double hi = 1.0;
  const auto [slo, shi] = support();
  const double cap = std::isfinite(shi) ? std::max(std::abs(slo), shi) : 1e308;
  while (hi < cap && abs_cdf(hi) < p) hi = std::min(2.0 * hi, cap);
  double lo = 0.0;
  for (int it = 0; it < 200 && (hi - lo) > 1e-13 * std::max(1.0, hi); ++it) {
    const double mid = 0.5 * (lo + hi);
    (abs_cdf(mid) < p ? lo : hi) = mid;
  }
  return hi;
}

const InverseCdfTable& Distribution::table() const {
  if (!table_) throw ConfigError("not a tabulated distribution");
  return *table_;
}

}  // namespace lzo

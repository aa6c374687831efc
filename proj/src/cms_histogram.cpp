#include "streampred/cms_histogram.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>

#include "streampred/errors.hpp"

namespace streampred {

IntervalPartition::IntervalPartition(double lo, double hi, std::size_t bins)
    : lo_(lo), hi_(hi), bins_(bins) {
  if (!std::isfinite(lo) || !std::isfinite(hi) || !(hi > lo)) {
    throw InvalidConfig("partition requires finite bounds with hi > lo");
  }
  if (bins == 0) throw InvalidConfig("partition requires at least one bin");
}

double IntervalPartition::edge(std::size_t k) const {
  if (k >= bins_) return hi_;
  if (k == 0) return lo_;
  return lo_ + (hi_ - lo_) * static_cast<double>(k) / static_cast<double>(bins_);
}

double IntervalPartition::midpoint(std::size_t k) const {
  return lo_ + (hi_ - lo_) * (static_cast<double>(k) - 0.5) /
                   static_cast<double>(bins_);
}

std::size_t IntervalPartition::bin_index(double y) const {
  if (!std::isfinite(y)) throw InvalidInput("non-finite value");
  if (y <= lo_) return 1;
  if (y > hi_) return bins_;
  const double scaled =
      std::ceil(static_cast<double>(bins_) * (y - lo_) / (hi_ - lo_));
  auto k = static_cast<std::size_t>(
      std::clamp(scaled, 1.0, static_cast<double>(bins_)));
  // The ceiling can land one bin off when y sits on a computed edge; settle
  // it against the same edges that midpoint()/edge() report.
  if (k > 1 && y <= edge(k - 1)) --k;
  if (k < bins_ && y > edge(k)) ++k;
  return k;
}

bool is_prime(std::uint64_t x) {
  if (x < 2) return false;
  if (x % 2 == 0) return x == 2;
  for (std::uint64_t f = 3; f * f <= x; f += 2) {
    if (x % f == 0) return false;
  }
  return true;
}

std::uint64_t next_prime_above(std::uint64_t x) {
  std::uint64_t c = x + 1;
  while (!is_prime(c)) ++c;
  return c;
}

HashRow HashRow::make(std::uint64_t a, std::uint64_t b, std::uint64_t p,
                      std::uint64_t w, std::size_t bins) {
  if (!is_prime(p)) throw InvalidConfig("hash modulus must be prime");
  if (p <= bins) throw InvalidConfig("hash modulus must exceed the bin count");
  if (p >= (1ULL << 32)) throw InvalidConfig("hash modulus too large");
  if (a < 1 || a >= p) throw InvalidConfig("hash multiplier out of range");
  if (b >= p) throw InvalidConfig("hash offset out of range");
  if (w < 1) throw InvalidConfig("hash width must be positive");
  return HashRow{a, b, p, w};
}

HashRow HashRow::random(std::size_t bins, std::uint64_t w,
                        std::mt19937_64& rng) {
  const std::uint64_t p =
      next_prime_above(std::max<std::uint64_t>(bins, w));
  std::uniform_int_distribution<std::uint64_t> pick_a(1, p - 1);
  std::uniform_int_distribution<std::uint64_t> pick_b(0, p - 1);
  const std::uint64_t a = pick_a(rng);
  const std::uint64_t b = pick_b(rng);
  return make(a, b, p, w, bins);
}

CmsHistogram::CmsHistogram(IntervalPartition partition,
                           std::vector<HashRow> rows)
    : partition_(partition), rows_(std::move(rows)) {
  if (rows_.empty()) throw InvalidConfig("sketch needs at least one hash row");
  width_ = static_cast<std::size_t>(rows_.front().w);
  for (const HashRow& r : rows_) {
    HashRow::make(r.a, r.b, r.p, r.w, partition_.bins());
    if (r.w != rows_.front().w) {
      throw InvalidConfig("all hash rows must share one width");
    }
  }
  counters_.assign(rows_.size() * width_, 0);
}

CmsHistogram CmsHistogram::with_seed(IntervalPartition partition,
                                     std::size_t depth, std::size_t width,
                                     std::uint64_t seed) {
  if (depth == 0 || width == 0) {
    throw InvalidConfig("sketch depth and width must be positive");
  }
  std::mt19937_64 rng(seed);
  std::vector<HashRow> rows;
  rows.reserve(depth);
  for (std::size_t j = 0; j < depth; ++j) {
    rows.push_back(HashRow::random(partition.bins(), width, rng));
  }
  return CmsHistogram(partition, std::move(rows));
}

std::size_t CmsHistogram::checked_bin(double y) {
  const std::size_t k = partition_.bin_index(y);
  if (!partition_.contains(y)) ++clamped_;
  return k;
}

void CmsHistogram::update(double y) {
  const std::size_t k = checked_bin(y);
  for (std::size_t j = 0; j < rows_.size(); ++j) {
    ++counters_[j * width_ + (rows_[j](k) - 1)];
  }
  ++n_;
}

void CmsHistogram::update_batch(std::span<const double> ys, Execution exec) {
  std::vector<std::size_t> bins(ys.size());
  for (std::size_t i = 0; i < ys.size(); ++i) bins[i] = checked_bin(ys[i]);

  const auto depth = static_cast<std::ptrdiff_t>(rows_.size());
  if (exec == Execution::parallel) {
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t j = 0; j < depth; ++j) {
      const HashRow row = rows_[j];
      std::uint64_t* line = counters_.data() + j * width_;
      for (const std::size_t k : bins) ++line[row(k) - 1];
    }
  } else {
    for (std::ptrdiff_t j = 0; j < depth; ++j) {
      const HashRow row = rows_[j];
      std::uint64_t* line = counters_.data() + j * width_;
      for (const std::size_t k : bins) ++line[row(k) - 1];
    }
  }
  n_ += ys.size();
}

std::uint64_t CmsHistogram::estimate_bin(std::size_t k) const {
  if (k < 1 || k > partition_.bins()) {
    throw InvalidInput("bin id out of range");
  }
  std::uint64_t best = std::numeric_limits<std::uint64_t>::max();
  for (std::size_t j = 0; j < rows_.size(); ++j) {
    best = std::min(best, counters_[j * width_ + (rows_[j](k) - 1)]);
  }
  return best;
}

std::vector<std::uint64_t> CmsHistogram::estimate_all() const {
  std::vector<std::uint64_t> out(partition_.bins());
  for (std::size_t k = 1; k <= out.size(); ++k) out[k - 1] = estimate_bin(k);
  return out;
}

double CmsHistogram::eedf(double y) const {
  if (n_ == 0) throw EmptySketch("eedf of an empty sketch");
  if (!std::isfinite(y)) throw InvalidInput("non-finite value");
  if (y <= partition_.lo()) return 0.0;
  const std::size_t top = partition_.bin_index(y);
  std::uint64_t total = 0;
  for (std::size_t k = 1; k <= top; ++k) total += estimate_bin(k);
  return static_cast<double>(total) / static_cast<double>(n_);
}

void CmsHistogram::clear() {
  std::fill(counters_.begin(), counters_.end(), 0);
  n_ = 0;
  clamped_ = 0;
}

// Format, one record per line:
//   streampred-cms 1
//   partition <lo> <hi> <K>          (bounds as C99 hex floats)
//   rows <d> <W>
//   <a> <b> <p> <w>                  (d lines)
//   totals <n> <clamped>
//   <W counters>                     (d lines)
void CmsHistogram::serialize(std::ostream& out) const {
  char lo[64];
  char hi[64];
  std::snprintf(lo, sizeof lo, "%a", partition_.lo());
  std::snprintf(hi, sizeof hi, "%a", partition_.hi());
  out << "streampred-cms 1\n";
  out << "partition " << lo << ' ' << hi << ' ' << partition_.bins() << '\n';
  out << "rows " << rows_.size() << ' ' << width_ << '\n';
  for (const HashRow& r : rows_) {
    out << r.a << ' ' << r.b << ' ' << r.p << ' ' << r.w << '\n';
  }
  out << "totals " << n_ << ' ' << clamped_ << '\n';
  for (std::size_t j = 0; j < rows_.size(); ++j) {
    for (std::size_t w = 0; w < width_; ++w) {
      if (w) out << ' ';
      out << counters_[j * width_ + w];
    }
    out << '\n';
  }
}

namespace {

void expect_token(std::istream& in, const std::string& want) {
  std::string got;
  if (!(in >> got) || got != want) {
    throw InvalidInput("sketch checkpoint: expected '" + want + "'");
  }
}

double read_hexfloat(std::istream& in) {
  std::string tok;
  if (!(in >> tok)) throw InvalidInput("sketch checkpoint: truncated");
  char* end = nullptr;
  const double v = std::strtod(tok.c_str(), &end);
  if (end != tok.c_str() + tok.size()) {
    throw InvalidInput("sketch checkpoint: bad number '" + tok + "'");
  }
  return v;
}

template <typename T>
T read_value(std::istream& in) {
  T v{};
  if (!(in >> v)) throw InvalidInput("sketch checkpoint: truncated");
  return v;
}

}  // namespace

CmsHistogram CmsHistogram::deserialize(std::istream& in) {
  expect_token(in, "streampred-cms");
  if (read_value<int>(in) != 1) {
    throw InvalidInput("sketch checkpoint: unsupported version");
  }
  expect_token(in, "partition");
  const double lo = read_hexfloat(in);
  const double hi = read_hexfloat(in);
  const auto bins = read_value<std::size_t>(in);
  expect_token(in, "rows");
  const auto depth = read_value<std::size_t>(in);
  const auto width = read_value<std::size_t>(in);
  std::vector<HashRow> rows;
  for (std::size_t j = 0; j < depth; ++j) {
    HashRow r;
    r.a = read_value<std::uint64_t>(in);
    r.b = read_value<std::uint64_t>(in);
    r.p = read_value<std::uint64_t>(in);
    r.w = read_value<std::uint64_t>(in);
    rows.push_back(r);
  }
  CmsHistogram sketch(IntervalPartition(lo, hi, bins), std::move(rows));
  if (sketch.width_ != width) {
    throw InvalidInput("sketch checkpoint: width mismatch");
  }
  expect_token(in, "totals");
  sketch.n_ = read_value<std::uint64_t>(in);
  sketch.clamped_ = read_value<std::uint64_t>(in);
  for (std::uint64_t& c : sketch.counters_) c = read_value<std::uint64_t>(in);
  return sketch;
}

}  // namespace streampred

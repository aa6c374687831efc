#ifndef STREAMPRED_CMS_HISTOGRAM_HPP
#define STREAMPRED_CMS_HISTOGRAM_HPP

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <random>
#include <span>
#include <vector>

#include "streampred/execution.hpp"

namespace streampred {

// K equal-width half-open bins over (lo, hi]. Bin ids are 1-based:
// bin k covers (lo + (k-1)w, lo + k*w] with w = (hi - lo) / K.
class IntervalPartition {
 public:
  IntervalPartition(double lo, double hi, std::size_t bins);

  double lo() const { return lo_; }
  double hi() const { return hi_; }
  std::size_t bins() const { return bins_; }
  double width() const { return (hi_ - lo_) / static_cast<double>(bins_); }

  // Upper edge of bin k (k in 0..K); edge(0) == lo, edge(K) == hi.
  double edge(std::size_t k) const;
  double midpoint(std::size_t k) const;

  bool contains(double y) const { return y > lo_ && y <= hi_; }

  // Clamps: y <= lo maps to bin 1, y > hi maps to bin K.
  // Throws InvalidInput for non-finite y.
  std::size_t bin_index(double y) const;

  friend bool operator==(const IntervalPartition&,
                         const IntervalPartition&) = default;

 private:
  double lo_;
  double hi_;
  std::size_t bins_;
};

// Carter-Wegman row h(k) = ((a*k + b) mod p) mod W, reported in 1..W.
struct HashRow {
  std::uint64_t a = 1;
  std::uint64_t b = 0;
  std::uint64_t p = 2;
  std::uint64_t w = 1;

  // Validates p prime, p > bins, 1 <= a < p, b < p, w >= 1.
  static HashRow make(std::uint64_t a, std::uint64_t b, std::uint64_t p,
                      std::uint64_t w, std::size_t bins);

  // Draws a, b uniformly with p the smallest prime > max(bins, w).
  static HashRow random(std::size_t bins, std::uint64_t w, std::mt19937_64& rng);

  std::size_t operator()(std::size_t k) const {
    return static_cast<std::size_t>(((a * k + b) % p) % w) + 1;
  }

  friend bool operator==(const HashRow&, const HashRow&) = default;
};

bool is_prime(std::uint64_t x);
std::uint64_t next_prime_above(std::uint64_t x);

// Count-Min sketch keyed by bin index of an IntervalPartition.
class CmsHistogram {
 public:
  CmsHistogram(IntervalPartition partition, std::vector<HashRow> rows);

  // d rows of width W drawn from a PRNG seeded with `seed`.
  static CmsHistogram with_seed(IntervalPartition partition, std::size_t depth,
                                std::size_t width, std::uint64_t seed);

  void update(double y);

  // Same result as calling update() for every element in order. The parallel
  // path splits work across hash rows.
  void update_batch(std::span<const double> ys,
                    Execution exec = Execution::parallel);

  // min over rows of the counter the bin hashes to.
  std::uint64_t estimate_bin(std::size_t k) const;
  std::vector<std::uint64_t> estimate_all() const;

  // Estimated EDF: sum_{k <= bin(y)} estimate_bin(k) / n. Not clamped at 1.
  // 0 for y <= lo. Throws EmptySketch when n == 0.
  double eedf(double y) const;

  // Zeroes all counters; keeps partition and hash rows.
  void clear();

  const IntervalPartition& partition() const { return partition_; }
  const std::vector<HashRow>& rows() const { return rows_; }
  std::size_t depth() const { return rows_.size(); }
  std::size_t width() const { return width_; }
  std::uint64_t n() const { return n_; }
  std::uint64_t clamped() const { return clamped_; }
  std::uint64_t counter(std::size_t row, std::size_t bucket) const {
    return counters_[row * width_ + (bucket - 1)];
  }

  // Text checkpoint; layout documented in README.md.
  void serialize(std::ostream& out) const;
  static CmsHistogram deserialize(std::istream& in);

  friend bool operator==(const CmsHistogram&, const CmsHistogram&) = default;

 private:
  std::size_t checked_bin(double y);

  IntervalPartition partition_;
  std::vector<HashRow> rows_;
  std::size_t width_ = 0;
  std::vector<std::uint64_t> counters_;
  std::uint64_t n_ = 0;
  std::uint64_t clamped_ = 0;
};

}  // namespace streampred

#endif  // STREAMPRED_CMS_HISTOGRAM_HPP

#ifndef STREAMPRED_BASELINES_HPP
#define STREAMPRED_BASELINES_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <vector>

namespace streampred {

// Dirichlet-process posterior predictive point estimate:
//   y_hat = sum_j y'_j n_j / (M + n) + M / (M + n) * median(G0)
// with G0 discrete uniform on [lo, hi] (median = midpoint). Distinct values
// are detected after rounding to `precision` decimal places; lo/hi track
// the streaming min/max of the observed (rounded) values.
class DppState {
 public:
  explicit DppState(double mass = 1.0, int precision = 6);

  // Sets G0's range before any data arrives; observations widen it.
  void set_prior_range(double lo, double hi);

  void observe(double y);
  double predict() const;

  double mass() const { return mass_; }
  std::uint64_t n() const { return n_; }
  std::size_t distinct() const { return counts_.size(); }
  std::optional<double> g0_lo() const { return lo_; }
  std::optional<double> g0_hi() const { return hi_; }

  // Weights n_j / (M + n) in key order followed by M / (M + n).
  std::vector<double> weights() const;

 private:
  double round_value(double y) const;

  double mass_;
  int precision_;
  double scale_;
  std::map<std::int64_t, std::uint64_t> counts_;
  std::uint64_t n_ = 0;
  std::optional<double> lo_;
  std::optional<double> hi_;
};

// Normal-experts Shtarkov point predictor: the running sample mean, kept
// with Neumaier-compensated summation.
class ShtarkovState {
 public:
  void observe(double y);
  double predict() const;

  std::uint64_t n() const { return n_; }
  double sum() const { return sum_ + compensation_; }

 private:
  double sum_ = 0.0;
  double compensation_ = 0.0;
  std::uint64_t n_ = 0;
};

// One-shot helpers over a snapshot of values.
double dpp_predict_from(std::span<const double> values, double mass,
                        int precision);
double shtarkov_predict_from(std::span<const double> values);

}  // namespace streampred

#endif  // STREAMPRED_BASELINES_HPP

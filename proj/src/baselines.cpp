#include "streampred/baselines.hpp"

#include <algorithm>
#include <cmath>

#include "streampred/errors.hpp"

namespace streampred {

DppState::DppState(double mass, int precision)
    : mass_(mass), precision_(precision), scale_(std::pow(10.0, precision)) {
  if (!(mass > 0.0) || !std::isfinite(mass)) {
    throw InvalidConfig("DP mass must be positive");
  }
  if (precision < 0 || precision > 12) {
    throw InvalidConfig("DP rounding precision must be in 0..12");
  }
}

void DppState::set_prior_range(double lo, double hi) {
  if (!std::isfinite(lo) || !std::isfinite(hi) || hi < lo) {
    throw InvalidConfig("DP prior range must be finite with lo <= hi");
  }
  lo_ = lo_ ? std::min(*lo_, lo) : lo;
  hi_ = hi_ ? std::max(*hi_, hi) : hi;
}

double DppState::round_value(double y) const {
  return static_cast<double>(std::llround(y * scale_)) / scale_;
}

void DppState::observe(double y) {
  if (!std::isfinite(y)) throw InvalidInput("non-finite value");
  const auto key = static_cast<std::int64_t>(std::llround(y * scale_));
  ++counts_[key];
  ++n_;
  const double v = round_value(y);
  lo_ = lo_ ? std::min(*lo_, v) : v;
  hi_ = hi_ ? std::max(*hi_, v) : v;
}

double DppState::predict() const {
  if (!lo_ || !hi_) {
    throw ColdStart("DP predictor has no data and no prior range");
  }
  const double denom = mass_ + static_cast<double>(n_);
  double acc = 0.0;
  for (const auto& [key, count] : counts_) {
    acc += (static_cast<double>(key) / scale_) *
           (static_cast<double>(count) / denom);
  }
  const double g0_median = 0.5 * (*lo_ + *hi_);
  return acc + (mass_ / denom) * g0_median;
}

std::vector<double> DppState::weights() const {
  const double denom = mass_ + static_cast<double>(n_);
  std::vector<double> w;
  w.reserve(counts_.size() + 1);
  for (const auto& entry : counts_) {
    w.push_back(static_cast<double>(entry.second) / denom);
  }
  w.push_back(mass_ / denom);
  return w;
}

void ShtarkovState::observe(double y) {
  if (!std::isfinite(y)) throw InvalidInput("non-finite value");
  const double t = sum_ + y;
  if (std::abs(sum_) >= std::abs(y)) {
    compensation_ += (sum_ - t) + y;
  } else {
    compensation_ += (y - t) + sum_;
  }
  sum_ = t;
  ++n_;
}

double ShtarkovState::predict() const {
  if (n_ == 0) throw ColdStart("Shtarkov predictor has no data");
  return (sum_ + compensation_) / static_cast<double>(n_);
}

double dpp_predict_from(std::span<const double> values, double mass,
                        int precision) {
  DppState state(mass, precision);
  for (const double v : values) state.observe(v);
  return state.predict();
}

double shtarkov_predict_from(std::span<const double> values) {
  ShtarkovState state;
  for (const double v : values) state.observe(v);
  return state.predict();
}

}  // namespace streampred

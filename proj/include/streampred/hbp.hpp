#ifndef STREAMPRED_HBP_HPP
#define STREAMPRED_HBP_HPP

#include <cstddef>
#include <string_view>

#include "streampred/cms_histogram.hpp"

namespace streampred {

enum class HbpVariant { mean, median };

struct HbpConfig {
  HbpVariant variant = HbpVariant::median;
  std::size_t bins = 100;   // K
  std::size_t depth = 10;   // d
  std::size_t width = 50;   // W
};

// sum_k midpoint(k) * estimate_bin(k) / n. The weights are the raw sketch
// estimates over n and can sum above one; they are not renormalized.
double predict_mean(const CmsHistogram& sketch);

// Weighted median of bin midpoints under normalized weights
// W_k = a_k / sum(a). Among bins with positive weight, takes the last one
// whose cumulative weight is <= 1/2 and the first one past 1/2 and averages
// their midpoints; when no positive bin sits at or below 1/2 the upper
// midpoint is returned alone. Always lies in [lo, hi].
double predict_median(const CmsHistogram& sketch);

double predict(const CmsHistogram& sketch, HbpVariant variant);

}  // namespace streampred

#endif  // STREAMPRED_HBP_HPP

#include "streampred/hbp.hpp"

#include "streampred/errors.hpp"

namespace streampred {

double predict_mean(const CmsHistogram& sketch) {
  if (sketch.n() == 0) throw EmptySketch("mean prediction from an empty sketch");
  const IntervalPartition& part = sketch.partition();
  const double n = static_cast<double>(sketch.n());
  double acc = 0.0;
  for (std::size_t k = 1; k <= part.bins(); ++k) {
    acc += part.midpoint(k) * (static_cast<double>(sketch.estimate_bin(k)) / n);
  }
  return acc;
}

double predict_median(const CmsHistogram& sketch) {
  if (sketch.n() == 0) {
    throw EmptySketch("median prediction from an empty sketch");
  }
  const IntervalPartition& part = sketch.partition();
  const std::size_t bins = part.bins();
  // Two sweeps over the estimates instead of materializing them keeps the
  // per-step prediction allocation-free.
  std::uint64_t total = 0;
  for (std::size_t k = 1; k <= bins; ++k) total += sketch.estimate_bin(k);

  // Integer comparisons: cumulative <= total/2 is 2*cumulative <= total.
  std::size_t lower = 0;  // last positive bin with cumulative <= 1/2, or 0
  std::size_t upper = 0;  // first bin with cumulative > 1/2
  std::uint64_t cum = 0;
  for (std::size_t k = 1; k <= bins; ++k) {
    const std::uint64_t a = sketch.estimate_bin(k);
    if (a == 0) continue;
    cum += a;
    if (2 * cum <= total) {
      lower = k;
    } else {
      upper = k;
      break;
    }
  }
  if (upper == 0) upper = lower;  // unreachable for total > 0; keeps it total
  if (lower == 0) return part.midpoint(upper);
  return 0.5 * (part.midpoint(lower) + part.midpoint(upper));
}

double predict(const CmsHistogram& sketch, HbpVariant variant) {
  return variant == HbpVariant::mean ? predict_mean(sketch)
                                     : predict_median(sketch);
}

}  // namespace streampred

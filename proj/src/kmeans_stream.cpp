#include "streampred/kmeans_stream.hpp"

#include <algorithm>
#include <cmath>

#include "streampred/errors.hpp"

namespace streampred {

StreamKMeans::StreamKMeans(std::size_t k_max) : k_max_(k_max) {
  if (k_max == 0) throw InvalidConfig("k-means capacity must be positive");
  slots_.reserve(k_max);
}

void StreamKMeans::observe(double y) {
  if (!std::isfinite(y)) throw InvalidInput("non-finite value");
  ++n_;
  if (slots_.size() < k_max_) {
    slots_.push_back(Center{y, 1});
    return;
  }
  std::size_t best = 0;
  double best_dist = std::abs(y - slots_[0].value);
  for (std::size_t i = 1; i < slots_.size(); ++i) {
    const double d = std::abs(y - slots_[i].value);
    if (d < best_dist) {
      best_dist = d;
      best = i;
    }
  }
  Center& c = slots_[best];
  ++c.count;
  c.value += (y - c.value) / static_cast<double>(c.count);
}

std::vector<double> StreamKMeans::centers(CenterOrder order) const {
  std::vector<double> out;
  out.reserve(slots_.size());
  for (const Center& c : slots_) out.push_back(c.value);
  if (order == CenterOrder::sorted) std::sort(out.begin(), out.end());
  return out;
}

}  // namespace streampred

#ifndef STREAMPRED_KMEANS_STREAM_HPP
#define STREAMPRED_KMEANS_STREAM_HPP

#include <cstddef>
#include <cstdint>
#include <vector>

namespace streampred {

enum class CenterOrder { slot, sorted };

// Sequential (MacQueen) K-means over scalars with a fixed number of slots.
// The first k_max observations become centers verbatim; afterwards each
// value joins its nearest center (lowest slot wins ties) and that center
// moves by (y - c) / count.
class StreamKMeans {
 public:
  struct Center {
    double value = 0.0;
    std::uint64_t count = 0;
  };

  explicit StreamKMeans(std::size_t k_max = 200);

  void observe(double y);

  // Copy of center values, in slot order or ascending by value.
  std::vector<double> centers(CenterOrder order = CenterOrder::slot) const;
  const std::vector<Center>& slots() const { return slots_; }

  std::size_t capacity() const { return k_max_; }
  std::uint64_t n() const { return n_; }

 private:
  std::size_t k_max_;
  std::vector<Center> slots_;
  std::uint64_t n_ = 0;
};

}  // namespace streampred

#endif  // STREAMPRED_KMEANS_STREAM_HPP

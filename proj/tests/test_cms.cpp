#include <random>
#include <sstream>

#include "doctest.h"
#include "oracles.hpp"
#include "streampred/cms_histogram.hpp"
#include "streampred/errors.hpp"

using namespace streampred;

namespace {

std::vector<double> uniform_stream(std::size_t n, double lo, double hi,
                                   std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<double> v(n);
  for (auto& x : v) x = u(rng);
  return v;
}

// One row with a = 1, b = 0 and W >= K maps bin k to bucket k + 1.
CmsHistogram injective(double lo, double hi, std::size_t bins) {
  const std::uint64_t p = next_prime_above(bins + 1);
  return CmsHistogram(IntervalPartition(lo, hi, bins),
                      {HashRow::make(1, 0, p, p, bins)});
}

}  // namespace

TEST_CASE("bin_index examples") {
  const IntervalPartition part(0.0, 10.0, 10);
  CHECK(part.bin_index(0.5) == 1);
  CHECK(part.bin_index(10.0) == 10);
  CHECK(part.bin_index(3.0) == 3);
  CHECK(part.bin_index(3.0000001) == 4);
  CHECK_THROWS_AS(part.bin_index(std::nan("")), InvalidInput);
}

TEST_CASE("bin_index clamps outside the range") {
  const IntervalPartition part(0.0, 10.0, 10);
  CHECK(part.bin_index(0.0) == 1);
  CHECK(part.bin_index(-5.0) == 1);
  CHECK(part.bin_index(11.0) == 10);
}

TEST_CASE("bin_index agrees with a linear edge scan") {
  const IntervalPartition part(-3.7, 12.1, 37);
  auto ys = uniform_stream(20000, -3.7, 12.1, 5);
  for (std::size_t k = 0; k <= 37; ++k) ys.push_back(part.edge(k));
  for (const double y : ys) {
    CHECK(part.bin_index(y) == oracle::bin_of(y, -3.7, 12.1, 37));
  }
}

TEST_CASE("partition geometry") {
  const IntervalPartition part(0.0, 4.0, 4);
  CHECK(part.midpoint(1) == doctest::Approx(0.5));
  CHECK(part.midpoint(4) == doctest::Approx(3.5));
  CHECK(part.edge(0) == 0.0);
  CHECK(part.edge(4) == 4.0);
  CHECK_THROWS_AS(IntervalPartition(1.0, 1.0, 3), InvalidConfig);
  CHECK_THROWS_AS(IntervalPartition(0.0, 1.0, 0), InvalidConfig);
}

TEST_CASE("hash row evaluation") {
  const HashRow r = HashRow::make(1, 0, 11, 5, 10);
  CHECK(r(3) == 4);
  CHECK(r(7) == 3);
  const HashRow id = HashRow::make(1, 0, 11, 11, 10);
  for (std::size_t k = 1; k <= 10; ++k) CHECK(id(k) == k + 1);
}

TEST_CASE("hash row validation") {
  CHECK_THROWS_AS(HashRow::make(1, 0, 12, 5, 10), InvalidConfig);   // not prime
  CHECK_THROWS_AS(HashRow::make(1, 0, 7, 5, 10), InvalidConfig);    // p <= K
  CHECK_THROWS_AS(HashRow::make(0, 0, 11, 5, 10), InvalidConfig);   // a = 0
  CHECK_THROWS_AS(HashRow::make(1, 11, 11, 5, 10), InvalidConfig);  // b = p
  CHECK_THROWS_AS(HashRow::make(1, 0, 11, 0, 10), InvalidConfig);
}

TEST_CASE("random rows use the smallest prime above max(K, W)") {
  std::mt19937_64 rng(1);
  const HashRow r = HashRow::random(100, 50, rng);
  CHECK(r.p == 101);
  const HashRow s = HashRow::random(10, 136, rng);
  CHECK(s.p == 137);
  CHECK(r.a >= 1);
  CHECK(r.a < r.p);
  CHECK(r.b < r.p);
}

TEST_CASE("fresh update touches one counter per row") {
  auto sketch = CmsHistogram::with_seed(IntervalPartition(0, 10, 10), 4, 7, 3);
  sketch.update(0.5);
  CHECK(sketch.n() == 1);
  for (std::size_t j = 0; j < 4; ++j) {
    int ones = 0;
    for (std::size_t w = 0; w < 7; ++w) ones += sketch.counter(j, w) == 1;
    CHECK(ones == 1);
  }
}

TEST_CASE("injective rows give exact bin counts") {
  auto sketch = injective(0, 10, 10);
  sketch.update(2.5);
  sketch.update(2.7);
  CHECK(sketch.estimate_bin(3) == 2);
  const auto ys = uniform_stream(3000, 0, 10, 9);
  auto s2 = injective(0, 10, 10);
  for (const double y : ys) s2.update(y);
  const auto exact = oracle::histogram(ys, 0, 10, 10);
  for (std::size_t k = 1; k <= 10; ++k) CHECK(s2.estimate_bin(k) == exact[k - 1]);
}

TEST_CASE("row sums equal n") {
  auto sketch = CmsHistogram::with_seed(IntervalPartition(-1, 1, 25), 5, 9, 77);
  const auto ys = uniform_stream(1000, -1.5, 1.5, 4);
  for (const double y : ys) sketch.update(y);
  for (std::size_t j = 0; j < 5; ++j) {
    std::uint64_t sum = 0;
    for (std::size_t w = 1; w <= 9; ++w) {
      sum += sketch.counter(j, w);
      CHECK(sketch.counter(j, w) <= sketch.n());
    }
    CHECK(sum == 1000);
  }
  CHECK(sketch.clamped() > 0);
}

TEST_CASE("estimates match the brute-force row oracle and overestimate") {
  for (std::uint64_t seed : {1u, 2u, 3u, 4u}) {
    auto sketch = CmsHistogram::with_seed(IntervalPartition(0, 4, 4), 2, 2, seed);
    const auto ys = uniform_stream(500, 0, 4, seed + 100);
    for (const double y : ys) sketch.update(y);
    const auto want = oracle::cms_minimums(sketch, ys);
    const auto exact = oracle::histogram(ys, 0, 4, 4);
    for (std::size_t k = 1; k <= 4; ++k) {
      CHECK(sketch.estimate_bin(k) == want[k - 1]);
      CHECK(sketch.estimate_bin(k) >= exact[k - 1]);
    }
  }
}

TEST_CASE("empty sketch") {
  auto sketch = CmsHistogram::with_seed(IntervalPartition(0, 1, 5), 3, 4, 0);
  for (std::size_t k = 1; k <= 5; ++k) CHECK(sketch.estimate_bin(k) == 0);
  CHECK_THROWS_AS(sketch.eedf(0.5), EmptySketch);
  CHECK_THROWS_AS(sketch.estimate_bin(0), InvalidInput);
  CHECK_THROWS_AS(sketch.estimate_bin(6), InvalidInput);
  CHECK_THROWS_AS(sketch.update(INFINITY), InvalidInput);
}

TEST_CASE("eedf with injective rows is the exact EDF") {
  auto sketch = injective(0, 10, 10);
  const auto ys = uniform_stream(777, 0, 10, 12);
  for (const double y : ys) sketch.update(y);
  const auto exact = oracle::histogram(ys, 0, 10, 10);
  std::uint64_t cum = 0;
  for (std::size_t k = 1; k <= 10; ++k) {
    cum += exact[k - 1];
    CHECK(sketch.eedf(sketch.partition().edge(k)) ==
          doctest::Approx(static_cast<double>(cum) / 777.0).epsilon(1e-15));
  }
  CHECK(sketch.eedf(0.0) == 0.0);
  CHECK(sketch.eedf(-3.0) == 0.0);
}

TEST_CASE("eedf under collisions matches oracle cumulative minimums") {
  const IntervalPartition part(0, 4, 4);
  CmsHistogram sketch(part, {HashRow::make(1, 0, 5, 2, 4)});
  const std::vector<double> ys{0.5, 1.5, 1.6, 2.5, 3.5, 3.6, 3.7};
  for (const double y : ys) sketch.update(y);
  const auto mins = oracle::cms_minimums(sketch, ys);
  std::uint64_t cum = 0;
  double prev = 0.0;
  for (std::size_t k = 1; k <= 4; ++k) {
    cum += mins[k - 1];
    const double f = sketch.eedf(part.edge(k));
    CHECK(f == doctest::Approx(static_cast<double>(cum) / 7.0));
    CHECK(f >= prev);
    prev = f;
  }
  // Overestimation lets the EEDF pass 1.
  CHECK(sketch.eedf(4.0) > 1.0);
}

TEST_CASE("eedf is nondecreasing and dominates the EDF") {
  auto sketch = CmsHistogram::with_seed(IntervalPartition(0, 1, 50), 3, 8, 21);
  const auto ys = uniform_stream(2000, 0, 1, 22);
  for (const double y : ys) sketch.update(y);
  const auto exact = oracle::histogram(ys, 0, 1, 50);
  double prev = 0.0;
  std::uint64_t cum = 0;
  for (std::size_t k = 1; k <= 50; ++k) {
    cum += exact[k - 1];
    const double f = sketch.eedf(sketch.partition().edge(k));
    CHECK(f >= prev);
    CHECK(f >= static_cast<double>(cum) / 2000.0 - 1e-15);
    prev = f;
  }
}

TEST_CASE("batch update matches sequential updates in both execution modes") {
  const auto ys = uniform_stream(5000, -0.2, 1.2, 31);
  auto seq = CmsHistogram::with_seed(IntervalPartition(0, 1, 64), 8, 33, 5);
  auto ser = seq;
  auto par = seq;
  for (const double y : ys) seq.update(y);
  ser.update_batch(ys, Execution::serial);
  par.update_batch(ys, Execution::parallel);
  CHECK(ser == seq);
  CHECK(par == seq);
  CHECK(par.clamped() == seq.clamped());
}

TEST_CASE("serialization round trip") {
  auto sketch = CmsHistogram::with_seed(IntervalPartition(-0.1, 2.3, 17), 4, 11, 8);
  for (const double y : uniform_stream(400, -1, 3, 2)) sketch.update(y);
  std::stringstream buf;
  sketch.serialize(buf);
  const auto back = CmsHistogram::deserialize(buf);
  CHECK(back == sketch);
  CHECK(back.partition().lo() == sketch.partition().lo());

  std::stringstream bad("streampred-cms 2\n");
  CHECK_THROWS_AS(CmsHistogram::deserialize(bad), InvalidInput);
  std::stringstream truncated("streampred-cms 1\npartition 0x0p+0 0x1p+0 3\nrows 1 5\n");
  CHECK_THROWS_AS(CmsHistogram::deserialize(truncated), InvalidInput);
}

TEST_CASE("clear resets counts") {
  auto sketch = CmsHistogram::with_seed(IntervalPartition(0, 1, 5), 2, 3, 1);
  sketch.update(0.3);
  sketch.update(7.0);
  sketch.clear();
  CHECK(sketch.n() == 0);
  CHECK(sketch.clamped() == 0);
  CHECK(sketch.estimate_bin(2) == 0);
}

TEST_CASE("rows must share a width") {
  const IntervalPartition part(0, 1, 4);
  CHECK_THROWS_AS(CmsHistogram(part, {HashRow::make(1, 0, 5, 2, 4),
                                      HashRow::make(1, 0, 5, 3, 4)}),
                  InvalidConfig);
  CHECK_THROWS_AS(CmsHistogram(part, {}), InvalidConfig);
}

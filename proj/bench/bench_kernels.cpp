// Serial reference against the OpenMP paths: sketch batch updates and the
// per-method fan-out of the prequential harness.
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <random>
#include <vector>

#include <omp.h>

#include "streampred/cms_histogram.hpp"
#include "streampred/harness.hpp"

using namespace streampred;

namespace {

template <class F>
double best_of(int reps, F&& f) {
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    f();
    best = std::min(best, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  }
  return best;
}

void report(const char* name, double serial, double parallel, bool same) {
  std::printf("%-28s serial %9.4fs  parallel %9.4fs  speedup %5.2fx  %s\n", name, serial,
              parallel, serial / parallel, same ? "identical" : "MISMATCH");
}

}  // namespace

int main(int argc, char** argv) {
  const std::size_t n = argc > 1 ? std::strtoull(argv[1], nullptr, 10) : 1000000;
  std::printf("threads %d, n %zu\n", omp_get_max_threads(), n);
  std::mt19937_64 rng(1);
  std::gamma_distribution<double> g(1.2, 3.0);
  std::vector<double> ys(n);
  for (auto& y : ys) y = g(rng);

  for (const std::size_t depth : {4, 10, 32}) {
    const IntervalPartition part(0, 40, 200);
    auto a = CmsHistogram::with_seed(part, depth, 2000, 3);
    auto b = a;
    const double ts = best_of(3, [&] { a.clear(); a.update_batch(ys, Execution::serial); });
    const double tp = best_of(3, [&] { b.clear(); b.update_batch(ys, Execution::parallel); });
    char name[64];
    std::snprintf(name, sizeof name, "cms update_batch d=%zu", depth);
    report(name, ts, tp, a == b);
  }

  const std::vector<double> stream(ys.begin(), ys.begin() + std::min<std::size_t>(n, 20000));
  ExperimentConfig cfg;
  cfg.precision = 2;
  std::vector<MethodResult> ra, rb;
  const double ts = best_of(2, [&] {
    ra = run_one_pass(stream, kOnePassMethods, cfg, {Execution::serial, false});
  });
  const double tp = best_of(2, [&] {
    rb = run_one_pass(stream, kOnePassMethods, cfg, {Execution::parallel, false});
  });
  bool same = ra.size() == rb.size();
  for (std::size_t i = 0; same && i < ra.size(); ++i) {
    same = ra[i].ledger.cpe_sum == rb[i].ledger.cpe_sum;
  }
  report("one-pass method fan-out", ts, tp, same);
  return same ? 0 : 1;
}

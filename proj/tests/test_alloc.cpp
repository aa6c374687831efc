#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <new>
#include <random>
#include <vector>

#include "streampred/harness.hpp"

namespace {
std::atomic<std::size_t> g_allocs{0};
}

void* operator new(std::size_t size) {
  g_allocs.fetch_add(1, std::memory_order_relaxed);
  if (void* p = std::malloc(size ? size : 1)) return p;
  throw std::bad_alloc();
}
void operator delete(void* p) noexcept { std::free(p); }
void operator delete(void* p, std::size_t) noexcept { std::free(p); }

using namespace streampred;

namespace {

// Allocations made during `steps` predict/observe calls after construction.
std::size_t steady_allocs(Method m, std::size_t steps) {
  std::mt19937_64 rng(5);
  std::gamma_distribution<double> g(1.5, 2.0);
  std::vector<double> burnin(200);
  for (auto& y : burnin) y = g(rng);
  std::vector<double> tail(steps);
  for (auto& y : tail) y = g(rng);
  ExperimentConfig cfg;
  PredictorHandle h(m, Mode::one_pass, cfg, burnin);
  const std::size_t before = g_allocs.load();
  double sink = 0.0;
  for (const double y : tail) {
    sink += h.predict();
    h.observe(y);
  }
  const std::size_t used = g_allocs.load() - before;
  if (!(sink == sink)) std::puts("nan");
  return used;
}

}  // namespace

int main() {
  int failures = 0;
  for (const Method m : {Method::hbp_mean, Method::hbp_median}) {
    const std::size_t a = steady_allocs(m, 1000);
    const std::size_t b = steady_allocs(m, 10000);
    const bool ok = a == 0 && b == 0;
    std::printf("%s %s one-pass steps allocate %zu (1e3) and %zu (1e4)\n",
                ok ? "PASS" : "FAIL", std::string(to_string(m)).c_str(), a, b);
    failures += !ok;
  }
  return failures == 0 ? 0 : 1;
}

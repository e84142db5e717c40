#include <benchmark/benchmark.h>

#include "fdnet/analytic.hpp"
#include "fdnet/numerics.hpp"

using namespace fdnet;

// Uncached F: a fresh tolerance per iteration keeps the memo table from answering.
static void BM_FUncached(benchmark::State& state) {
  const double alpha = static_cast<double>(state.range(0)) / 10.0;
  double tol = 1e-9;
  for (auto _ : state) {
    tol *= 1.0000001;
    benchmark::DoNotOptimize(analytic::f_fn(1.0, alpha, 1.0, {tol, 1e-12, 2000}));
  }
}
BENCHMARK(BM_FUncached)->Arg(25)->Arg(40)->Arg(60)->Unit(benchmark::kMillisecond);

static void BM_FCached(benchmark::State& state) {
  analytic::f_fn(1.0, 4.0, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(analytic::f_fn(1.0, 4.0, 1.0));
}
BENCHMARK(BM_FCached);

static void BM_ThroughputGain(benchmark::State& state) {
  const analytic::NetworkConfig c(0.3, 1.0, 1.0, 4.0);
  for (auto _ : state) benchmark::DoNotOptimize(analytic::throughput_gain(c));
}
BENCHMARK(BM_ThroughputGain);

static void BM_Gamma(benchmark::State& state) {
  double x = 0.5;
  for (auto _ : state) {
    benchmark::DoNotOptimize(numerics::gamma_fn(x));
    x = x < 9.0 ? x + 0.37 : 0.5;
  }
}
BENCHMARK(BM_Gamma);

#include <benchmark/benchmark.h>

#include "fdnet/mcsim.hpp"

using namespace fdnet;

static void BM_EstimatePs(benchmark::State& state) {
  const analytic::NetworkConfig c(0.1, 1.0, 1.0, 4.0);
  const analytic::MacProfile mac(0.0, 0.5, 0.5);
  const double w = mcsim::default_window_radius(c, mac);
  const auto threads = static_cast<unsigned>(state.range(0));
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(mcsim::estimate_ps(c, mac, 10000, w, seed++, threads).mean);
  state.SetItemsProcessed(state.iterations() * 10000);
}
BENCHMARK(BM_EstimatePs)->Arg(1)->Arg(0)->Unit(benchmark::kMillisecond)->UseRealTime();

static void BM_SampleRealization(benchmark::State& state) {
  const analytic::NetworkConfig c(0.1, 1.0, 1.0, 4.0);
  const analytic::MacProfile mac(0.0, 0.5, 0.5);
  std::uint64_t trial = 0;
  for (auto _ : state) {
    CounterRng rng(1, trial++);
    benchmark::DoNotOptimize(mcsim::sample_realization(c, mac, 60.0, rng).links.size());
  }
}
BENCHMARK(BM_SampleRealization)->Unit(benchmark::kMicrosecond);

#include <benchmark/benchmark.h>

#include "ccdyn/sampling.hpp"

using namespace ccdyn;

static void BM_WeightedDrain(benchmark::State& state) {
  RngStream rng(5, 7);
  const int64_t n = state.range(0);
  std::vector<uint64_t> weights(static_cast<size_t>(n));
  for (int64_t i = 0; i < n; ++i) weights[static_cast<size_t>(i)] = 1 + (i * 37) % 97;
  for (auto _ : state) {
    WeightedSampler s(weights);
    while (!s.empty()) benchmark::DoNotOptimize(s.sample_remove(rng));
  }
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_WeightedDrain)->Arg(1024)->Arg(16384)->Arg(131072);

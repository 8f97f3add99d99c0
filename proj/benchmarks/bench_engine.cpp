#include <benchmark/benchmark.h>

#include "ccdyn/engine.hpp"
#include "ccdyn/plugins.hpp"

using namespace ccdyn;

static void BM_EngineUpdates(benchmark::State& state) {
  const int32_t n = static_cast<int32_t>(state.range(0));
  RngStream rng(6, 7);
  Graph g = Graph::gnp(n, 3.0 / n, rng);
  EngineConfig cfg;
  cfg.epsilon = 0.5;
  cfg.c = 3.0;
  cfg.mode = state.range(1) ? EngineMode::Deamortized : EngineMode::Amortized;
  Engine e(g, Clustering::singletons(n), make_pipeline("pivot"), cfg, nullptr);
  for (auto _ : state) {
    VertexId u = static_cast<VertexId>(rng.uniform_int(n));
    VertexId v = static_cast<VertexId>(rng.uniform_int(n - 1));
    if (v >= u) ++v;
    e.flip(u, v);
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_EngineUpdates)->Args({512, 0})->Args({512, 1})->Args({4096, 0})->Args({4096, 1});

#include <benchmark/benchmark.h>

#include "ccdyn/reconcile.hpp"

using namespace ccdyn;

static void BM_ApplyFlips(benchmark::State& state) {
  const int32_t n = 4096;
  RngStream rng(4, 7);
  Graph g = Graph::gnp(n, 4.0 / n, rng);
  ClusterRepresentation rep = ClusterRepresentation::singletons(g);
  const int64_t flips = state.range(0);
  for (auto _ : state) {
    state.PauseTiming();
    UpdateBuffer buf(n);
    for (int64_t i = 0; i < flips; ++i) {
      VertexId u = static_cast<VertexId>(rng.uniform_int(n));
      VertexId v = static_cast<VertexId>(rng.uniform_int(n - 1));
      if (v >= u) ++v;
      buf.record(u, v);
    }
    state.ResumeTiming();
    apply_flips(rep, buf);
  }
  state.SetItemsProcessed(state.iterations() * flips);
}
BENCHMARK(BM_ApplyFlips)->Arg(64)->Arg(512)->Arg(4096);

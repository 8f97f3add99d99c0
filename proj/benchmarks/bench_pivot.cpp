#include <benchmark/benchmark.h>

#include "ccdyn/oracle.hpp"
#include "ccdyn/pivot.hpp"
#include "ccdyn/reconcile.hpp"

using namespace ccdyn;

namespace {

// Clique-union graph with noise edges: the violation set stays much smaller
// than the graph, which is the regime the contracted pivot targets.
ClusterRepresentation noisy_cliques(int32_t clusters, int32_t size, int32_t noise, RngStream& rng) {
  int32_t n = clusters * size;
  Graph g(n);
  for (int32_t c = 0; c < clusters; ++c)
    for (VertexId u = c * size; u < (c + 1) * size; ++u)
      for (VertexId v = u + 1; v < (c + 1) * size; ++v) g.add_edge(u, v);
  for (int32_t i = 0; i < noise; ++i) {
    VertexId u = static_cast<VertexId>(rng.uniform_int(n));
    VertexId v = static_cast<VertexId>(rng.uniform_int(n - 1));
    if (v >= u) ++v;
    g.flip_edge(u, v);
  }
  std::vector<ClusterId> lab(static_cast<size_t>(n));
  for (VertexId v = 0; v < n; ++v) lab[static_cast<size_t>(v)] = v / size;
  return ClusterRepresentation::from(g, Clustering::from_labels(lab));
}

}  // namespace

static void BM_PivotOnRepresentation(benchmark::State& state) {
  RngStream rng(1, 7);
  ClusterRepresentation rep = noisy_cliques(static_cast<int32_t>(state.range(0)), 32,
                                            static_cast<int32_t>(state.range(0)) * 8, rng);
  for (auto _ : state) {
    PivotOutput out = pivot_cluster(rep, rng);
    benchmark::DoNotOptimize(out.clustering);
  }
  state.counters["violations"] = static_cast<double>(rep.cost());
  state.counters["n"] = static_cast<double>(rep.n());
}
BENCHMARK(BM_PivotOnRepresentation)->Arg(8)->Arg(32)->Arg(128);

static void BM_ClassicPivot(benchmark::State& state) {
  RngStream rng(2, 7);
  Graph g = Graph::gnp(static_cast<int32_t>(state.range(0)), 0.1, rng);
  for (auto _ : state) {
    Clustering c = classic_pivot(g, rng);
    benchmark::DoNotOptimize(c);
  }
}
BENCHMARK(BM_ClassicPivot)->Arg(256)->Arg(1024)->Arg(4096);

static void BM_SymmetricDifferenceUpdate(benchmark::State& state) {
  RngStream rng(3, 7);
  ClusterRepresentation rep = noisy_cliques(static_cast<int32_t>(state.range(0)), 32,
                                            static_cast<int32_t>(state.range(0)) * 8, rng);
  for (auto _ : state) {
    state.PauseTiming();
    PivotOutput out = pivot_cluster(rep, rng);
    state.ResumeTiming();
    auto res = symmetric_difference_update(rep, out.clustering, out.move_log);
    benchmark::DoNotOptimize(res);
  }
}
BENCHMARK(BM_SymmetricDifferenceUpdate)->Arg(8)->Arg(32)->Arg(128);

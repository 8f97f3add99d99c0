#pragma once

// Shared generators for test corpora: seeded random graphs, random
// clusterings, and an exact pivot-distribution oracle via subset DP.

#include <bit>
#include <cstdint>
#include <map>
#include <vector>

#include "ccdyn/graph.hpp"
#include "ccdyn/representation.hpp"
#include "ccdyn/rng.hpp"

namespace testcorpus {

inline ccdyn::Clustering random_clustering(int32_t n, int32_t k, ccdyn::RngStream& rng) {
  std::vector<ccdyn::ClusterId> labels(static_cast<size_t>(n));
  for (auto& l : labels) l = static_cast<ccdyn::ClusterId>(rng.uniform_int(k));
  return ccdyn::Clustering::from_labels(labels);
}

inline ccdyn::ClusterRepresentation random_representation(int32_t n, double p, int32_t k,
                                                          ccdyn::RngStream& rng) {
  ccdyn::Graph g = ccdyn::Graph::gnp(n, p, rng);
  return ccdyn::ClusterRepresentation::from(g, random_clustering(n, k, rng));
}

/// Exact distribution of the classic pivot's output cost: expectation by
/// recursion over the remaining vertex subset, pivot uniform among the
/// remaining vertices. n <= 20.
class PivotCostDistribution {
 public:
  explicit PivotCostDistribution(const ccdyn::Graph& g) : g_(&g), n_(g.n()) {
    adj_.assign(static_cast<size_t>(n_), 0);
    for (ccdyn::VertexId u = 0; u < n_; ++u)
      for (ccdyn::VertexId v : g.neighbors(u)) adj_[static_cast<size_t>(u)] |= (1u << v);
  }

  /// Probability mass over final cost values.
  std::map<int64_t, double> cost_distribution() {
    std::map<uint32_t, std::map<int64_t, double>> memo;
    return walk(static_cast<uint32_t>((uint64_t{1} << n_) - 1), memo);
  }

  double expected_cost() {
    double e = 0;
    for (auto& [c, p] : cost_distribution()) e += static_cast<double>(c) * p;
    return e;
  }

 private:
  std::map<int64_t, double> walk(uint32_t remaining, std::map<uint32_t, std::map<int64_t, double>>& memo) {
    if (remaining == 0) return {{0, 1.0}};
    auto it = memo.find(remaining);
    if (it != memo.end()) return it->second;
    int32_t cnt = std::popcount(remaining);
    std::map<int64_t, double> dist;
    for (ccdyn::VertexId v = 0; v < n_; ++v) {
      if (!(remaining & (1u << v))) continue;
      uint32_t cluster = (adj_[static_cast<size_t>(v)] & remaining) | (1u << v);
      int64_t cost = carve_cost(cluster, remaining);
      auto sub = walk(remaining & ~cluster, memo);
      for (auto& [c, p] : sub) dist[c + cost] += p / static_cast<double>(cnt);
    }
    memo[remaining] = dist;
    return dist;
  }

  // Missing pairs inside the carved cluster plus its edges to the rest of
  // the remaining set (edges to already-carved vertices were charged then).
  int64_t carve_cost(uint32_t cluster, uint32_t remaining) const {
    int64_t missing = 0, cut = 0;
    for (ccdyn::VertexId u = 0; u < n_; ++u) {
      if (!(cluster & (1u << u))) continue;
      uint32_t nb = adj_[static_cast<size_t>(u)];
      missing += std::popcount(cluster & ~nb) - 1;     // cluster members not adjacent (minus u)
      cut += std::popcount(nb & remaining & ~cluster);  // edges leaving the cluster
    }
    return missing / 2 + cut;
  }

  const ccdyn::Graph* g_;
  int32_t n_;
  std::vector<uint32_t> adj_;
};

}  // namespace testcorpus

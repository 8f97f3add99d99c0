#include "ccdyn/adversary.hpp"

#include <stdexcept>

namespace ccdyn {

TwoPathsScript adversary_two_paths(int32_t n) {
  TwoPathsScript s;
  s.n = n;
  s.initial = Graph::two_paths(n);
  std::vector<ClusterId> labels(static_cast<size_t>(n));
  for (VertexId v = 0; v < n; ++v) labels[static_cast<size_t>(v)] = v / 3;
  s.initial_clustering = Clustering::from_labels(labels);
  for (VertexId i = 0; i + 2 < n; i += 3) {
    s.stream.push_back({'-', i, static_cast<VertexId>(i + 1)});
    s.stream.push_back({'-', static_cast<VertexId>(i + 1), static_cast<VertexId>(i + 2)});
  }
  return s;
}

int64_t TwoPathsScript::opt_cost_after(int64_t i) const {
  // Every intact 2-path costs exactly 1; once its first edge is gone, the
  // remainder clusters for free.
  int64_t paths = n / 3;
  return paths - (i + 1) / 2;
}

Clustering TwoPathsScript::opt_clustering_after(int64_t i) const {
  std::vector<ClusterId> labels(static_cast<size_t>(n));
  ClusterId next = 0;
  for (int64_t p = 0; p < n / 3; ++p) {
    VertexId a = static_cast<VertexId>(3 * p), b = a + 1, c = a + 2;
    int64_t removed = std::max<int64_t>(0, std::min<int64_t>(2, i - 2 * p));
    if (removed == 0) {
      labels[static_cast<size_t>(a)] = labels[static_cast<size_t>(b)] = labels[static_cast<size_t>(c)] = next++;
    } else if (removed == 1) {
      labels[static_cast<size_t>(a)] = next++;
      labels[static_cast<size_t>(b)] = labels[static_cast<size_t>(c)] = next++;
    } else {
      labels[static_cast<size_t>(a)] = next++;
      labels[static_cast<size_t>(b)] = next++;
      labels[static_cast<size_t>(c)] = next++;
    }
  }
  return Clustering::from_labels(labels);
}

UpdateStream adversary_oblivious_random(const Graph& initial, int32_t T, RngStream& rng) {
  Graph g = initial;
  UpdateStream s;
  const int32_t n = g.n();
  if (n < 2) throw std::invalid_argument("need at least two vertices");
  for (int32_t i = 0; i < T; ++i) {
    VertexId u = static_cast<VertexId>(rng.uniform_int(n));
    VertexId v = static_cast<VertexId>(rng.uniform_int(n - 1));
    if (v >= u) ++v;
    bool present = g.has_edge(u, v);
    g.flip_edge(u, v);
    Pair p(u, v);
    s.push_back({present ? '-' : '+', p.a, p.b});
  }
  return s;
}

UpdateOp AdaptiveGreedyAdversary::next(const std::vector<ClusterId>& clustering) {
  const int32_t n = g_.n();
  if (static_cast<int32_t>(clustering.size()) != n)
    throw std::invalid_argument("clustering snapshot of wrong size");
  VertexId bu = 0, bv = 1;
  int best = -2;
  for (VertexId u = 0; u < n && best < 1; ++u) {
    for (VertexId v = u + 1; v < n; ++v) {
      bool same = clustering[static_cast<size_t>(u)] == clustering[static_cast<size_t>(v)];
      bool edge = g_.has_edge(u, v);
      // Deleting an in-cluster edge or inserting a cross non-edge hurts most.
      int delta = (same == edge) ? +1 : -1;
      if (delta > best) {
        best = delta;
        bu = u;
        bv = v;
        if (best == 1) break;
      }
    }
  }
  bool present = g_.has_edge(bu, bv);
  g_.flip_edge(bu, bv);
  return {present ? '-' : '+', bu, bv};
}

}  // namespace ccdyn

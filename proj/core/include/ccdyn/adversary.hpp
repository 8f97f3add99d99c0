#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "ccdyn/clustering.hpp"
#include "ccdyn/graph.hpp"
#include "ccdyn/rng.hpp"
#include "ccdyn/stream.hpp"

namespace ccdyn {

/// Deletion schedule over n/3 disjoint 2-paths: both edges of each path are
/// removed one by one, driving the optimum to zero at the end. Paired with
/// its closed-form optimum script (valid at any n, without the oracle).
struct TwoPathsScript {
  Graph initial;
  Clustering initial_clustering;  // one cluster per path, cost n/3
  UpdateStream stream;            // 2n/3 annotated deletions
  /// Exact optimum cost after the first `i` stream updates.
  int64_t opt_cost_after(int64_t i) const;
  /// An optimal clustering after the first `i` stream updates.
  Clustering opt_clustering_after(int64_t i) const;
  int32_t n = 0;
};

TwoPathsScript adversary_two_paths(int32_t n);

/// T random annotated flips over a fixed vertex set (insert when absent,
/// delete when present), oblivious to the engine; replayable from the seed.
UpdateStream adversary_oblivious_random(const Graph& initial, int32_t T, RngStream& rng);

/// Adaptive greedy adversary: observes only the exposed clustering snapshot
/// and flips the pair that increases the maintained cost the most
/// (ties: lowest pair id). Tracks the graph itself from its own updates.
class AdaptiveGreedyAdversary {
 public:
  explicit AdaptiveGreedyAdversary(Graph initial) : g_(std::move(initial)) {}

  /// Chooses and applies the next flip given the engine's clustering.
  UpdateOp next(const std::vector<ClusterId>& clustering);

  const Graph& graph() const { return g_; }

 private:
  Graph g_;
};

}  // namespace ccdyn

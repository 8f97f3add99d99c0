#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "ccdyn/preclustering.hpp"
#include "ccdyn/reconcile.hpp"
#include "ccdyn/representation.hpp"
#include "ccdyn/rng.hpp"

namespace ccdyn {

/// Edge weight function: every pair starts at 1; each recorded clustering
/// layer adds beta to the edges it cuts. Missing-pair costs stay 1.
struct WeightLayers {
  double beta = 0.5;
  std::vector<std::vector<ClusterId>> layers;

  void add_layer(const Clustering& c) { layers.push_back(c.dense_labels()); }
  double edge_weight(VertexId u, VertexId v) const {
    double w = 1.0;
    for (const auto& l : layers)
      if (l[static_cast<size_t>(u)] != l[static_cast<size_t>(v)]) w += beta;
    return w;
  }
  double max_weight() const { return 1.0 + beta * static_cast<double>(layers.size()); }
};

/// Exact weighted improvement cost(C) - cost(C + K) of inserting the set K
/// as a cluster into `work`, with edges read from the fixed graph encoded by
/// `base` (the representation the search started from).
double local_improvement(const Clustering& work, const std::vector<VertexId>& K,
                         const ClusterRepresentation& base, const WeightLayers& layers);

/// Convenience overload against an explicit graph with unit weights.
double local_improvement(const Clustering& work, const std::vector<VertexId>& K, const Graph& g);

struct CandidateCluster {
  VertexId pivot = -1;
  std::vector<VertexId> members;  // sorted; contains all of K(pivot)
  double est_improvement = 0.0;
  std::optional<double> exact_improvement;
};

struct GenerateOptions {
  bool exact = true;  // exact member-contribution enumeration vs pair sampling
};

/// Grows a candidate K(p) <= C <= N_cand(p) greedily by marginal
/// contribution, never splitting atoms and keeping all members pairwise
/// atomic-or-admissible. In exact mode est == exact improvement; in sampled
/// mode the estimate is built from gamma pair samples and shifted so that
/// overestimates are exponentially unlikely.
CandidateCluster generate_cluster(VertexId pivot, const Clustering& work,
                                  const ClusterRepresentation& base, Preclustering& pre,
                                  const WeightLayers& layers, int64_t gamma, RngStream& rng,
                                  GenerateOptions opts = {});

struct LocalSearchOptions {
  double eps_prime_divisor = 8.0;   // eps' = eps / divisor
  double round_multiplier = 1.0;    // rounds per pass = ceil(multiplier * |D|)
  bool exact_improvement = true;
  /// Step budget: kLocalSearchBudgetFactor * (|D| + 1) / eps' counted steps.
  int64_t budget_factor = 256;
  /// Optional warm start; defaults to the input representation's clustering.
  const Clustering* start = nullptr;
};

struct LocalSearchResult {
  ClusterRepresentation rep;
  bool aborted = false;  // returned the input because of the guard or budget
  int64_t steps = 0;
  double applied_improvement = 0.0;
};

/// Iterative cluster-insertion search over the preclustered representation;
/// returns an eps-good local optimum with respect to the input violation
/// set. Never returns more violations than the input.
LocalSearchResult local_search(const ClusterRepresentation& rep, Preclustering& pre, double eps,
                               RngStream& rng, const WeightLayers& layers = {},
                               LocalSearchOptions opts = {});

// Appendix-table budgets on the three-clustering separation count.
inline constexpr int32_t kBudgetPlus[4] = {0, 0, 1, 3};
inline constexpr int32_t kBudgetMinus[4] = {3, 2, 1, 0};

/// Number of the three clusterings separating u and v.
int32_t separation_count(const std::vector<ClusterId>& l1, const std::vector<ClusterId>& l2,
                         const std::vector<ClusterId>& l3, VertexId u, VertexId v);

/// Sum of the edge/non-edge budgets over all pairs.
int64_t triple_budget_sum(const Clustering& c1, const Clustering& c2, const Clustering& c3,
                          const Graph& g);

/// Six-term upper bound on the budget sum, computed from the three
/// clusterings directly (exact identity check in tests).
int64_t triple_budget_bound(const Clustering& c1, const Clustering& c2, const Clustering& c3,
                            const Graph& g);

/// Randomized pivot over three clusterings: join probabilities 1, 1/4 on
/// edges and 1, 3/4, 0 on non-edges, by separation count. Expected cost is
/// at most 1.5x the budget sum.
Clustering triple_pivot_random(const Clustering& c1, const Clustering& c2, const Clustering& c3,
                               const Graph& g, RngStream& rng);

struct IteratedOptions {
  double alpha = 0.18;  // target 2 - alpha; round count s = 1 + ceil(2 / (1/5 - alpha))
  LocalSearchOptions ls;
};

/// Rounds of the cut-penalty scheme: each round computes local optima under
/// escalating edge weights plus a randomized triple pivot, and the best of
/// all produced clusterings (by true cost) is returned after a final
/// unweighted polish pass.
LocalSearchResult iterated_flipping(const ClusterRepresentation& rep, Preclustering& pre,
                                    double eps, RngStream& rng, IteratedOptions opts = {});

int32_t iterated_round_count(double alpha);

/// Test-only certificate: sum over opt clusters of
/// max(0, cost(c) - cost(c + C*)) <= eps * d_size, unit weights.
bool epsilon_good_check(const Clustering& c, const Clustering& opt, const Graph& g, double eps,
                        int64_t d_size);
double epsilon_good_total(const Clustering& c, const Clustering& opt, const Graph& g);

}  // namespace ccdyn

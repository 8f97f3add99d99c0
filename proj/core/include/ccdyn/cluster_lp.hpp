#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "ccdyn/preclustering.hpp"
#include "ccdyn/representation.hpp"
#include "ccdyn/rng.hpp"

namespace ccdyn {

/// Sparse fractional clustering: a list of (vertex set, weight) entries.
struct FractionalSolution {
  struct Entry {
    std::vector<VertexId> members;  // sorted
    double z = 0.0;
  };
  int32_t n = 0;
  std::vector<Entry> support;
  std::vector<std::vector<int32_t>> sets_of;  // per vertex: indices into support

  void rebuild_index();
  /// Merges duplicate sets (summing weights) and drops zero entries.
  void normalize();

  double coverage(VertexId v) const;
  /// Separation value x_uv = 1 - sum of z over sets containing both, clamped
  /// to [0, 1].
  double x(VertexId u, VertexId v) const;
  /// Covering objective: sum over the support of cover(S) * z_S.
  double covering_objective(const ClusterRepresentation& rep) const;

  static FractionalSolution atoms_indicator(const ClusterRepresentation& rep);
};

void write_fractional(const FractionalSolution& z, std::ostream& out);
FractionalSolution read_fractional(std::istream& in);

/// cover(S) = cost(S) + d_cross(S), where cost(S) charges half of each cut
/// edge plus every missing internal pair, and d_cross(v) counts the
/// violations incident to v. Computed exactly (half-integers via doubling).
double cover_cost(const std::vector<VertexId>& members, const ClusterRepresentation& rep);

struct LpOptions {
  double gamma = 0.05;
  int32_t t_mw = 64;
  double eps = 0.1;
  bool exact_generator = true;  // exhaustive-verify generator vs sampled estimates
};

/// Generator for a cluster K(v) <= C <= N_cand(v) with cover(C) <= ratio *
/// p_hat(C): candidates are ranked by marginal cover increase per unit of
/// weight and prefixes scanned, then verified. Returns nullopt when no
/// scanned prefix qualifies. Sampled mode estimates the internal edge count
/// from t pair samples with a one-sided margin (false positives beyond the
/// gamma^2 d_adm band have probability at most exp(-t)).
std::optional<std::vector<VertexId>> find_small_ratio_cluster(
    VertexId v, const std::vector<double>& p_hat, double ratio, const ClusterRepresentation& rep,
    Preclustering& pre, RngStream& rng, int64_t t, const LpOptions& opts);

/// One aggregated-constraint solve: grows a family of disjoint clusters of
/// cover/weight ratio at most (1+3gamma)R (plus the cheap-base prelude at
/// (1+6gamma)R) until it carries more than gamma of the weight. Failure is a
/// value and signals the caller to adjust R.
std::optional<FractionalSolution> find_disjoint_family(const ClusterRepresentation& rep,
                                                       Preclustering& pre,
                                                       const std::vector<double>& p, double R,
                                                       RngStream& rng, const LpOptions& opts);

struct MwuResult {
  FractionalSolution z;
  bool degenerate = false;     // every ratio guess failed; atoms indicator returned
  double r_used = 0.0;         // accepted ratio guess
  double delta_measured = 0.0; // min support weight
  int32_t max_sets_per_vertex = 0;
  bool invariant_upper_ok = true;  // p_v <= 16 d_cross(v) / d_cross(V) each round
  bool invariant_lower_ok = true;  // conservative lower band
  bool atoms_split = false;        // any support set splitting an atom
  int32_t atom_joins = 0;          // supports covering more than one atom (reported)
};

/// Multiplicative-weights solve of the covering relaxation over the
/// preclustered representation: T_MW rounds of weight updates
/// w <- w * exp(-gamma^3 * margin) against disjoint-family solutions, with a
/// geometric sweep over the ratio guess, averaging, the atom feasibility
/// fix, and the 1/(1-2gamma) scale-up.
MwuResult mwu_solve(const ClusterRepresentation& rep, Preclustering& pre, RngStream& rng,
                    const LpOptions& opts = {});

/// Cluster-based rounding: each support set draws k_S = floor((n^c / z_S) *
/// log(1/p_S)) with p_S uniform in (0,1], each vertex takes the minimum over
/// its sets, and equal values merge. c = 3.
Clustering cluster_based_rounding(const FractionalSolution& z, RngStream& rng);

/// Pivot-based rounding with threshold 1/3 over the core-contracted view:
/// neighbors with x <= 1/3 join the pivot, non-neighbors join independently
/// with probability 1 - x, and a set drawn with the pivot's normalized
/// z-values adds its remaining neighbor members. Cores are broken lazily;
/// if the decided cost exceeds |D| the input clustering is returned.
Clustering pivot_based_rounding(const FractionalSolution& z, const ClusterRepresentation& rep,
                                RngStream& rng);

}  // namespace ccdyn

#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "ccdyn/representation.hpp"
#include "ccdyn/rng.hpp"
#include "ccdyn/scratch.hpp"

namespace ccdyn {

/// True when every member v of the cluster satisfies |N(v) xor C| < beta*|C|
/// (closed neighborhoods). Test/reference path against an explicit graph.
bool is_agreeing(const std::vector<VertexId>& cluster, const Graph& g, double beta);

struct CleanResult {
  ClusterRepresentation rep;
  int64_t steps = 0;
};

/// Cleaning pass: vertices with at least a*|C| violations are split off as
/// singletons; a cluster with at least b*|C| such vertices is shattered
/// entirely. With a = b = 0.05 every surviving non-singleton cluster is
/// 2/19-agreeing (strong) and |D'| <= 401 |D|. Runs in O(|D|) steps; only
/// clusters touched by D are examined.
CleanResult clean(const ClusterRepresentation& rep);

inline constexpr double kCleanA = 0.05;
inline constexpr double kCleanB = 0.05;
/// Exact violation-inflation factor of clean(): 1 + 1/(a*b).
inline constexpr int64_t kCleanCostFactor = 401;

struct AdmParams {
  double epsilon = 0.05;  // similarity parameter, must lie in (0, 0.1)
  int32_t t_floor = 8;    // confidence floor; per-vertex t = max(t_floor, ceil(2 ln d(v)))
  bool exact = false;     // deterministic admissibility (the test oracle mode)
};

/// Atoms (the non-singleton clusters of a cleaned representation) plus a
/// memoizing admissibility oracle. Holds a non-owning pointer to the atoms
/// representation, which must outlive the preclustering and stay unmodified.
class Preclustering {
 public:
  Preclustering(const ClusterRepresentation* atoms_rep, AdmParams params);

  const ClusterRepresentation& rep() const { return *rep_; }
  const AdmParams& params() const { return params_; }
  double epsilon() const { return params_.epsilon; }

  bool in_atom(VertexId v) const { return rep_->clustering.size(rep_->clustering.label(v)) > 1; }
  /// Cluster id of v's atom, or kNoCluster for singletons.
  ClusterId atom_of(VertexId v) const {
    ClusterId c = rep_->clustering.label(v);
    return rep_->clustering.size(c) > 1 ? c : kNoCluster;
  }
  /// K(v): the atom containing v, else {v}.
  std::vector<VertexId> base_cluster(VertexId v) const;
  int32_t base_cluster_size(VertexId v) const {
    ClusterId c = rep_->clustering.label(v);
    return rep_->clustering.size(c);
  }

  bool degree_similar(VertexId u, VertexId v) const {
    double du = rep_->deg(u), dv = rep_->deg(v);
    return params_.epsilon * du < dv && params_.epsilon * dv < du;
  }

  /// Deterministic admissible-neighbor lists of all atoms (built once from a
  /// scan of D) and the reverse atom lists per singleton.
  const std::vector<VertexId>& atom_admissible(ClusterId atom) const;
  const std::vector<ClusterId>& admissible_atoms_of(VertexId singleton) const;

  /// Randomized pair check for two singletons: samples t/eps^2 vertices of
  /// the larger closed neighborhood and thresholds the common-similar-
  /// neighbor estimate at (eps/2)(d(u)+d(v)). Verdicts are memoized
  /// write-once per pair. Degree-dissimilar pairs are rejected outright.
  bool check_admissible(VertexId u, VertexId v, RngStream& rng);

  /// Sampled admissible-neighbor listing for a singleton v: all members of
  /// admissible atoms, plus singletons reached through sampled similar
  /// neighbors and confirmed by check_admissible.
  std::vector<VertexId> list_admissible(VertexId v, RngStream& rng);

  /// Exact (deterministic) admissibility; the oracle the sampled mode is
  /// tested against. Atomic pairs and atom-atom pairs are not admissible.
  bool exact_admissible(VertexId u, VertexId v) const;

  /// Candidate growth pool around p: admissible singleton neighbors of K(p)
  /// (never members of other atoms). Uses the exact oracle when
  /// params.exact, the sampled listing otherwise.
  std::vector<VertexId> candidate_neighbors(VertexId p, RngStream& rng);

  /// Exhaustive candidate pool via the exact oracle.
  std::vector<VertexId> candidate_neighbors_exact(VertexId p) const;

  int32_t t_for(VertexId v) const;

  int64_t memo_entries() const { return memo_count_; }

 private:
  bool memo_lookup(VertexId u, VertexId v, bool& verdict) const;
  void memo_store(VertexId u, VertexId v, bool verdict);
  bool exact_pair_singletons(VertexId u, VertexId v) const;
  bool sampled_pair_singletons(VertexId u, VertexId v, RngStream& rng) const;

  const ClusterRepresentation* rep_;
  AdmParams params_;
  std::vector<std::vector<VertexId>> atom_adm_;        // by cluster id
  std::vector<std::vector<ClusterId>> atoms_of_;       // by vertex id
  std::vector<std::vector<std::pair<VertexId, bool>>> memo_;  // by vertex id
  int64_t memo_count_ = 0;
  std::vector<VertexId> empty_list_v_;
  std::vector<ClusterId> empty_list_c_;
  mutable StampSet scratch_a_, scratch_b_, scratch_c_;
};

/// Cleans are assumed done: rep's non-singleton clusters are the atoms.
/// Builds the deterministic atom lists and wraps the randomized oracle.
Preclustering build_preclustering(const ClusterRepresentation& atoms_rep, AdmParams params);

/// Representation format plus one line of per-cluster atom flags.
void write_preclustering(const ClusterRepresentation& atoms_rep, std::ostream& out);
ClusterRepresentation read_preclustering(std::istream& in);

/// Structural guarantees of a preclustering, evaluated exhaustively with the
/// exact oracle at desk scale (test support).
struct PreclusteringProperties {
  bool singleton_endpoint = true;   // every admissible pair has a singleton end
  bool degree_bound = true;         // d_adm(v) <= (1/eps^2 + 3) d(v)
  bool atom_degree_bound = true;    // d_adm(K) <= 3 d_D(K) / |K|
  bool total_bound = true;          // |E_adm| < (2/eps^2 + 6) cost(K)
  bool degree_similarity = true;    // admissible pairs are degree-similar
  int64_t admissible_pairs = 0;
  bool all() const {
    return singleton_endpoint && degree_bound && atom_degree_bound && total_bound && degree_similarity;
  }
};

PreclusteringProperties verify_preclustering_properties(const Preclustering& pre);

}  // namespace ccdyn

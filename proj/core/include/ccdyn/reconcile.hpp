#pragma once

#include <optional>
#include <vector>

#include "ccdyn/representation.hpp"
#include "ccdyn/scratch.hpp"

namespace ccdyn {

/// Buffer of edge flips since the last reconcile. A pair flipped an even
/// number of times has no net effect. Flips are grouped by the smaller
/// endpoint so the reconcile can process each touched vertex once.
class UpdateBuffer {
 public:
  explicit UpdateBuffer(int32_t n) : by_lo_(static_cast<size_t>(n)) {}

  void record(VertexId u, VertexId v) {
    Pair p(u, v);
    by_lo_[static_cast<size_t>(p.a)].push_back(p.b);
    if (by_lo_[static_cast<size_t>(p.a)].size() == 1) touched_lo_.push_back(p.a);
    ++count_;
  }

  int64_t size() const { return count_; }
  bool empty() const { return count_ == 0; }
  const std::vector<VertexId>& touched() const { return touched_lo_; }
  const std::vector<VertexId>& partners(VertexId lo) const { return by_lo_[static_cast<size_t>(lo)]; }

  void clear() {
    for (VertexId v : touched_lo_) by_lo_[static_cast<size_t>(v)].clear();
    touched_lo_.clear();
    count_ = 0;
  }

 private:
  std::vector<std::vector<VertexId>> by_lo_;
  std::vector<VertexId> touched_lo_;
  int64_t count_ = 0;
};

/// Reconciles rep.violation with the flips in buf (clustering unchanged):
/// each net-flipped pair toggles its membership in D, and degrees are
/// updated. O(|buf| + |D|) steps using size-n scratch arrays; the buffer is
/// cleared. Returns the step count used.
int64_t apply_flips(ClusterRepresentation& rep, UpdateBuffer& buf);

struct SymDiffResult {
  ClusterRepresentation rep;
  int64_t steps = 0;
};

/// Documented step-budget constant for symmetric_difference_update: the
/// simulation is cut off after kSymDiffBudgetFactor * (|D| + 1) counted steps.
inline constexpr int64_t kSymDiffBudgetFactor = 64;

/// Given (C, D) and a new clustering C' with the log of moved vertices,
/// computes D' = E symmetric-difference E(C') in O(|D| + |D'|) steps.
/// Returns nullopt (keep the old representation) when |D'| > |D| or when the
/// step budget trips.
std::optional<SymDiffResult> symmetric_difference_update(const ClusterRepresentation& rep,
                                                         const Clustering& new_clustering,
                                                         const std::vector<VertexId>& move_log);

/// Unconditional variant used by oracles/tests: never gives up, no budget.
SymDiffResult symmetric_difference_full(const ClusterRepresentation& rep,
                                        const Clustering& new_clustering,
                                        const std::vector<VertexId>& move_log);

enum class TieRule { KeepFirst, KeepSecond };

/// Returns the representation with the smaller violation set; ties keep `a`
/// under the default rule. In debug builds both arguments are checked to
/// encode the same graph (for small n).
const ClusterRepresentation& best_of(const ClusterRepresentation& a, const ClusterRepresentation& b,
                                     TieRule tie = TieRule::KeepFirst);

}  // namespace ccdyn

#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "ccdyn/types.hpp"

namespace ccdyn {

/// Vertex partition with O(1) move/same-cluster/size queries and per-cluster
/// doubly-linked member lists.
///
/// Each vertex has two label slots; a global flag selects the live slot, and
/// a vertex with only one slot written resolves to that slot regardless of
/// the flag. This lets a caller stage a replacement assignment for a set of
/// moved vertices and swap it in by flipping the flag, without rewriting the
/// labels of untouched vertices. Member lists always reflect the resolved
/// assignment.
class Clustering {
 public:
  Clustering() = default;

  static Clustering singletons(int32_t n);
  static Clustering one_cluster(int32_t n);
  /// Labels need not be dense; they are remapped to dense cluster ids.
  static Clustering from_labels(const std::vector<ClusterId>& labels);

  int32_t n() const { return static_cast<int32_t>(slot_[0].size()); }
  /// Number of allocated cluster ids (some may be empty).
  int32_t cluster_ids() const { return static_cast<int32_t>(head_.size()); }
  /// Number of non-empty clusters.
  int32_t cluster_count() const { return nonempty_; }

  ClusterId label(VertexId v) const {
    ClusterId c = slot_[live_][static_cast<size_t>(v)];
    return c != kNoCluster ? c : slot_[1 - live_][static_cast<size_t>(v)];
  }
  bool same(VertexId u, VertexId v) const { return label(u) == label(v); }
  int32_t size(ClusterId c) const { return size_[static_cast<size_t>(c)]; }

  /// First member of a cluster (kNoVertex when empty) and list successor.
  VertexId first(ClusterId c) const { return head_[static_cast<size_t>(c)]; }
  VertexId next(VertexId v) const { return next_[static_cast<size_t>(v)]; }

  template <class F>
  void for_members(ClusterId c, F&& f) const {
    for (VertexId v = first(c); v != -1; v = next(v)) f(v);
  }
  std::vector<VertexId> members(ClusterId c) const;

  ClusterId make_cluster();
  /// Ensures cluster id `c` exists (used to mirror allocations made in a copy).
  void ensure_cluster(ClusterId c);

  /// Moves v to cluster c in the live slot. O(1).
  void move(VertexId v, ClusterId c);

  // --- staged two-slot swap protocol -------------------------------------
  // Labels rest in the canonical slot. A swap stages new labels for the
  // moved vertices into the second slot, flips the flag (O(1); staged
  // vertices resolve through it, untouched ones fall through to their only
  // entry), then migrates the staged labels back into the canonical slot a
  // few per update and finally flips the flag back.
  /// Writes v's new label into the staging slot and repositions v in the
  /// member lists. The resolved label stays the old one until flip_slots().
  void stage_move(VertexId v, ClusterId c);
  /// O(1) switch making all staged labels live.
  void flip_slots();
  /// Moves v's staged label into the canonical slot.
  void clean_stale(VertexId v);
  /// Closes the swap window once every staged vertex was cleaned.
  void finish_swap();
  bool swap_open() const { return live_ == 1; }
  bool has_stale(VertexId v) const {
    return slot_[1][static_cast<size_t>(v)] != kNoCluster;
  }

  /// Dense relabeling 0..k-1 in order of first appearance by vertex id.
  std::vector<ClusterId> dense_labels() const;
  /// Canonical partition signature, independent of cluster id naming.
  std::vector<int32_t> canonical_signature() const;

  friend bool equivalent(const Clustering& a, const Clustering& b);

 private:
  void list_insert(VertexId v, ClusterId c);
  void list_remove(VertexId v);
  void init(int32_t n);

  std::array<std::vector<ClusterId>, 2> slot_;
  int live_ = 0;
  std::vector<VertexId> head_;   // per cluster
  std::vector<int32_t> size_;    // per cluster
  std::vector<VertexId> next_, prev_;
  int32_t nonempty_ = 0;
};

/// True when the two clusterings induce the same partition.
bool equivalent(const Clustering& a, const Clustering& b);

}  // namespace ccdyn

#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "ccdyn/clustering.hpp"
#include "ccdyn/graph.hpp"
#include "ccdyn/scratch.hpp"
#include "ccdyn/types.hpp"

namespace ccdyn {

/// Set of unordered pairs with per-vertex incidence lists. Insertions append;
/// deletions swap-remove and patch the incidence indices, so both are O(1)
/// without hashing.
class ViolationSet {
 public:
  ViolationSet() = default;
  explicit ViolationSet(int32_t n) : incident_(static_cast<size_t>(n)) {}

  int64_t size() const { return static_cast<int64_t>(entries_.size()); }
  bool empty() const { return entries_.empty(); }
  Pair pair(int64_t idx) const { return {entries_[static_cast<size_t>(idx)].u, entries_[static_cast<size_t>(idx)].v}; }

  /// Appends (u, v); the pair must not already be present.
  void add(VertexId u, VertexId v);
  /// Removes the entry at index idx (swap-remove).
  void remove_at(int64_t idx);

  int32_t incident_count(VertexId v) const { return static_cast<int32_t>(incident_[static_cast<size_t>(v)].size()); }
  const std::vector<int64_t>& incident(VertexId v) const { return incident_[static_cast<size_t>(v)]; }
  VertexId other(int64_t idx, VertexId v) const {
    const Entry& e = entries_[static_cast<size_t>(idx)];
    return e.u == v ? e.v : e.u;
  }

  /// Linear scan of the smaller incidence list; test-path helper.
  int64_t find(VertexId u, VertexId v) const;
  bool contains(VertexId u, VertexId v) const { return find(u, v) >= 0; }

  std::vector<Pair> pairs() const;

  template <class F>
  void for_each(F&& f) const {
    for (const Entry& e : entries_) f(e.u, e.v);
  }

 private:
  struct Entry {
    VertexId u, v;       // normalized u < v
    int32_t pos_u, pos_v;  // positions within incident_[u] / incident_[v]
  };

  int32_t& pos_of(Entry& e, VertexId x) { return e.u == x ? e.pos_u : e.pos_v; }

  std::vector<Entry> entries_;
  std::vector<std::vector<int64_t>> incident_;
};

/// Clustering C plus the violation set D = E(G) symmetric-difference E(C).
/// |D| equals the correlation-clustering cost of C, and (C, D) uniquely
/// encodes the graph. Vertex degrees are carried along and maintained under
/// edge flips so algorithms can read them in O(1).
struct ClusterRepresentation {
  Clustering clustering;
  ViolationSet violation;
  std::vector<int32_t> degree;

  int32_t n() const { return clustering.n(); }
  int64_t cost() const { return violation.size(); }

  /// True when the pair is an edge of the encoded graph.
  bool edge_present(VertexId u, VertexId v) const {
    return clustering.same(u, v) != violation.contains(u, v);
  }

  /// Closed neighborhood size is degree(v) + 1.
  int32_t deg(VertexId v) const { return degree[static_cast<size_t>(v)]; }

  /// Enumerates open neighbors of v from the cluster membership and the
  /// violation incidence of v, in O(|C(v)| + d_D(v)) steps.
  template <class F>
  void for_neighbors(VertexId v, StampSet& scratch, F&& f) const {
    scratch.clear();
    for (int64_t idx : violation.incident(v)) scratch.mark(violation.other(idx, v));
    ClusterId c = clustering.label(v);
    clustering.for_members(c, [&](VertexId w) {
      if (w != v && !scratch.contains(w)) f(w);
    });
    for (int64_t idx : violation.incident(v)) {
      VertexId w = violation.other(idx, v);
      if (clustering.label(w) != c) f(w);
    }
  }

  std::vector<VertexId> neighbors(VertexId v, StampSet& scratch) const {
    std::vector<VertexId> out;
    for_neighbors(v, scratch, [&](VertexId w) { out.push_back(w); });
    return out;
  }

  /// Rebuilds the degree array from (C, D) alone, in O(n + |D|).
  void recompute_degrees();

  /// Reconstructs the encoded graph; oracle/test path, O(n^2) worst case.
  Graph reconstruct_graph() const;

  static ClusterRepresentation from(const Graph& g, Clustering c);
  static ClusterRepresentation singletons(const Graph& g);
};

/// Exact cost oracle: |E symmetric-difference E(C)|. Reference path,
/// O(m + sum |C_i|^2).
int64_t clustering_cost(const Graph& g, const Clustering& c);

/// Exact violation oracle; |result| == clustering_cost(g, c).
std::vector<Pair> violation(const Graph& g, const Clustering& c);

/// Canonical text serialization: "n k" header, a line of per-vertex cluster
/// ids (dense), then |D| and one violated pair per line.
void write_representation(const ClusterRepresentation& rep, std::ostream& out);
ClusterRepresentation read_representation(std::istream& in);

}  // namespace ccdyn

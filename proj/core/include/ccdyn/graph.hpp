#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "ccdyn/rng.hpp"
#include "ccdyn/types.hpp"

namespace ccdyn {

/// Undirected simple graph on a fixed vertex set [0, n) with sorted
/// adjacency lists. Serves as ground truth for oracles and harness
/// bookkeeping; the O(|D|)-time algorithm paths do not read it.
class Graph {
 public:
  Graph() = default;
  explicit Graph(int32_t n) : adj_(static_cast<size_t>(n)) {}

  int32_t n() const { return static_cast<int32_t>(adj_.size()); }
  int64_t m() const { return m_; }

  bool has_edge(VertexId u, VertexId v) const;
  /// Inserts edge (u, v); returns false if already present.
  bool add_edge(VertexId u, VertexId v);
  /// Removes edge (u, v); returns false if absent.
  bool remove_edge(VertexId u, VertexId v);
  /// Toggles presence; returns true if the edge is present afterwards.
  bool flip_edge(VertexId u, VertexId v);

  int32_t degree(VertexId v) const { return static_cast<int32_t>(adj_[static_cast<size_t>(v)].size()); }
  const std::vector<VertexId>& neighbors(VertexId v) const { return adj_[static_cast<size_t>(v)]; }

  std::vector<Pair> edges() const;

  /// Canonical serialization of the adjacency structure (oracle cache key).
  std::string canonical_key() const;

  static Graph gnp(int32_t n, double p, RngStream& rng);
  /// n/3 disjoint 2-paths on vertices (3i, 3i+1, 3i+2); n must be divisible by 3.
  static Graph two_paths(int32_t n);
  static Graph complete(int32_t n);

 private:
  void check_vertex(VertexId v) const;

  std::vector<std::vector<VertexId>> adj_;
  int64_t m_ = 0;
};

/// Edge-list file: header "n m", then one "u v" per line, 0-based,
/// whitespace separated; '#' starts a comment.
Graph read_edge_list(std::istream& in);
Graph read_edge_list_file(const std::string& path);
void write_edge_list(const Graph& g, std::ostream& out);

}  // namespace ccdyn

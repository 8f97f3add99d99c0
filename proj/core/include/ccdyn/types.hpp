#pragma once

#include <cstdint>
#include <utility>

namespace ccdyn {

using VertexId = int32_t;
using ClusterId = int32_t;

inline constexpr ClusterId kNoCluster = -1;

/// Unordered vertex pair, stored normalized as (min, max).
struct Pair {
  VertexId a = 0;
  VertexId b = 0;

  Pair() = default;
  Pair(VertexId u, VertexId v) : a(u < v ? u : v), b(u < v ? v : u) {}

  friend bool operator==(const Pair&, const Pair&) = default;
  friend auto operator<=>(const Pair&, const Pair&) = default;
};

}  // namespace ccdyn

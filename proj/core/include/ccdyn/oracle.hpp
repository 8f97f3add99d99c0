#pragma once

#include <cstdint>
#include <mutex>
#include <string>
#include <unordered_map>
#include <vector>

#include "ccdyn/clustering.hpp"
#include "ccdyn/graph.hpp"

namespace ccdyn {

struct OptResult {
  int64_t cost = 0;
  Clustering clustering;
};

enum class OptMethod { Auto, PartitionEnumeration, SubsetDp };

/// Exact minimum correlation-clustering cost and one witness partition.
/// Partition enumeration (with pruning) up to n = 12, subset dynamic
/// programming up to n = 16; larger inputs are refused.
OptResult brute_force_opt(const Graph& g, OptMethod method = OptMethod::Auto);

/// Memoizing wrapper keyed by the canonical adjacency serialization (no
/// isomorphism reduction). Safe for concurrent lookups.
class OptOracle {
 public:
  const OptResult& opt(const Graph& g);
  int64_t opt_cost(const Graph& g) { return opt(g).cost; }

 private:
  std::mutex mu_;
  std::unordered_map<std::string, OptResult> cache_;
};

}  // namespace ccdyn

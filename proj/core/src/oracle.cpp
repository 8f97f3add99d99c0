#include "ccdyn/oracle.hpp"

#include <algorithm>
#include <bit>
#include <stdexcept>

namespace ccdyn {

namespace {

// Branch-and-bound over restricted-growth assignments. Assigning v to an
// existing cluster pays the missing pairs inside it plus the cut edges to
// the other already-assigned vertices.
struct EnumState {
  const Graph* g;
  std::vector<uint32_t> adj_mask;           // n <= 32
  std::vector<uint32_t> cluster_mask;       // members per cluster id
  std::vector<int32_t> cluster_size;
  std::vector<ClusterId> label, best_label;
  int64_t best = INT64_MAX;

  void run(VertexId v, int32_t used, int64_t cost) {
    if (cost >= best) return;
    int32_t n = g->n();
    if (v == n) {
      best = cost;
      best_label = label;
      return;
    }
    uint32_t av = adj_mask[static_cast<size_t>(v)];
    int32_t assigned_neighbors = std::popcount(av & ((uint32_t{1} << v) - 1));
    for (int32_t c = 0; c < used; ++c) {
      int32_t inside = std::popcount(av & cluster_mask[static_cast<size_t>(c)]);
      int64_t delta = (cluster_size[static_cast<size_t>(c)] - inside)  // missing pairs
                      + (assigned_neighbors - inside);                 // cut edges
      cluster_mask[static_cast<size_t>(c)] |= (uint32_t{1} << v);
      ++cluster_size[static_cast<size_t>(c)];
      label[static_cast<size_t>(v)] = c;
      run(v + 1, used, cost + delta);
      cluster_mask[static_cast<size_t>(c)] &= ~(uint32_t{1} << v);
      --cluster_size[static_cast<size_t>(c)];
    }
    // New singleton cluster: pays the cut edges to assigned vertices.
    cluster_mask[static_cast<size_t>(used)] = (uint32_t{1} << v);
    cluster_size[static_cast<size_t>(used)] = 1;
    label[static_cast<size_t>(v)] = used;
    run(v + 1, used + 1, cost + assigned_neighbors);
    cluster_mask[static_cast<size_t>(used)] = 0;
    cluster_size[static_cast<size_t>(used)] = 0;
  }
};

OptResult opt_enumeration(const Graph& g) {
  int32_t n = g.n();
  EnumState st;
  st.g = &g;
  st.adj_mask.assign(static_cast<size_t>(n), 0);
  for (VertexId u = 0; u < n; ++u)
    for (VertexId v : g.neighbors(u)) st.adj_mask[static_cast<size_t>(u)] |= (uint32_t{1} << v);
  st.cluster_mask.assign(static_cast<size_t>(n) + 1, 0);
  st.cluster_size.assign(static_cast<size_t>(n) + 1, 0);
  st.label.assign(static_cast<size_t>(n), 0);
  st.best_label.assign(static_cast<size_t>(n), 0);
  if (n == 0) return {0, Clustering::singletons(0)};
  st.run(0, 0, 0);
  return {st.best, Clustering::from_labels(st.best_label)};
}

OptResult opt_subset_dp(const Graph& g) {
  int32_t n = g.n();
  if (n == 0) return {0, Clustering::singletons(0)};
  size_t full = size_t{1} << n;
  std::vector<uint32_t> adj_mask(static_cast<size_t>(n), 0);
  for (VertexId u = 0; u < n; ++u)
    for (VertexId v : g.neighbors(u)) adj_mask[static_cast<size_t>(u)] |= (uint32_t{1} << v);

  // e[S] = number of edges inside S.
  std::vector<int32_t> e(full, 0);
  for (uint32_t s = 1; s < full; ++s) {
    int32_t low = std::countr_zero(s);
    uint32_t rest = s & (s - 1);
    e[s] = e[rest] + std::popcount(adj_mask[static_cast<size_t>(low)] & rest);
  }

  std::vector<int64_t> f(full, 0);
  std::vector<uint32_t> choice(full, 0);
  for (uint32_t s = 1; s < full; ++s) {
    uint32_t pivot = s & (~s + 1);  // lowest set bit; it anchors the cluster
    int64_t bestv = INT64_MAX;
    uint32_t bestt = pivot;
    for (uint32_t t = s; t != 0; t = (t - 1) & s) {
      if (!(t & pivot)) continue;
      int32_t sz = std::popcount(t);
      int64_t missing = int64_t{sz} * (sz - 1) / 2 - e[t];
      int64_t cut = e[s] - e[t] - e[s & ~t];
      int64_t v = missing + cut + f[s & ~t];
      if (v < bestv) {
        bestv = v;
        bestt = t;
      }
    }
    f[s] = bestv;
    choice[s] = bestt;
  }

  std::vector<ClusterId> label(static_cast<size_t>(n), 0);
  uint32_t s = static_cast<uint32_t>(full - 1);
  ClusterId k = 0;
  while (s) {
    uint32_t t = choice[s];
    for (int32_t v = 0; v < n; ++v)
      if (t & (uint32_t{1} << v)) label[static_cast<size_t>(v)] = k;
    ++k;
    s &= ~t;
  }
  return {f[full - 1], Clustering::from_labels(label)};
}

}  // namespace

OptResult brute_force_opt(const Graph& g, OptMethod method) {
  int32_t n = g.n();
  if (method == OptMethod::Auto) method = n <= 12 ? OptMethod::PartitionEnumeration : OptMethod::SubsetDp;
  switch (method) {
    case OptMethod::PartitionEnumeration:
      if (n > 12) throw std::invalid_argument("partition enumeration supports n <= 12");
      return opt_enumeration(g);
    case OptMethod::SubsetDp:
      if (n > 16) throw std::invalid_argument("exact oracle supports n <= 16");
      return opt_subset_dp(g);
    default:
      throw std::logic_error("unreachable");
  }
}

const OptResult& OptOracle::opt(const Graph& g) {
  std::string key = g.canonical_key();
  std::scoped_lock lk(mu_);
  auto it = cache_.find(key);
  if (it != cache_.end()) return it->second;
  auto res = brute_force_opt(g);
  return cache_.emplace(std::move(key), std::move(res)).first->second;
}

}  // namespace ccdyn

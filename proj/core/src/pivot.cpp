#include "ccdyn/pivot.hpp"

#include <algorithm>
#include <numeric>

namespace ccdyn {

ContractedView contract(const ClusterRepresentation& rep, StepCounter* steps) {
  StepCounter local;
  StepCounter& sc = steps ? *steps : local;
  ContractedView view;
  view.n = rep.n();
  const Clustering& c = rep.clustering;

  StampSet active(static_cast<size_t>(rep.n()));
  std::vector<VertexId> active_vertices;
  rep.violation.for_each([&](VertexId u, VertexId v) {
    sc.add();
    for (VertexId x : {u, v}) {
      if (!active.contains(x)) {
        active.mark(x);
        active_vertices.push_back(x);
      }
    }
  });

  view.cluster_pos.assign(static_cast<size_t>(c.cluster_ids()), -1);
  view.weight.assign(static_cast<size_t>(rep.n()), 0);
  view.out_neighbors.resize(static_cast<size_t>(rep.n()));
  view.in_non_neighbors.resize(static_cast<size_t>(rep.n()));

  std::vector<int32_t> active_count;
  for (VertexId v : active_vertices) {
    sc.add();
    ClusterId cl = c.label(v);
    if (view.cluster_pos[static_cast<size_t>(cl)] < 0) {
      view.cluster_pos[static_cast<size_t>(cl)] = static_cast<int32_t>(view.active_clusters.size());
      view.active_clusters.push_back(cl);
      view.cluster_units.emplace_back();
      active_count.push_back(0);
    }
    int32_t pos = view.cluster_pos[static_cast<size_t>(cl)];
    view.cluster_units[static_cast<size_t>(pos)].push_back(v);
    ++active_count[static_cast<size_t>(pos)];
    view.units.push_back(v);
    view.weight[static_cast<size_t>(v)] = 1;
  }

  view.core_unit_of.assign(view.active_clusters.size(), -1);
  for (size_t pos = 0; pos < view.active_clusters.size(); ++pos) {
    sc.add();
    ClusterId cl = view.active_clusters[pos];
    int32_t core = c.size(cl) - active_count[pos];
    if (core > 0) {
      int64_t unit = view.n + static_cast<int64_t>(view.core_cluster.size());
      view.core_cluster.push_back(cl);
      view.core_unit_of[pos] = unit;
      view.cluster_units[pos].push_back(unit);
      view.units.push_back(unit);
      view.weight.push_back(static_cast<uint64_t>(core));
    }
  }

  rep.violation.for_each([&](VertexId u, VertexId v) {
    sc.add();
    if (c.same(u, v)) {
      view.in_non_neighbors[static_cast<size_t>(u)].push_back(v);
      view.in_non_neighbors[static_cast<size_t>(v)].push_back(u);
    } else {
      view.out_neighbors[static_cast<size_t>(u)].push_back(v);
      view.out_neighbors[static_cast<size_t>(v)].push_back(u);
    }
  });
  return view;
}

PivotOutput pivot_cluster(const ClusterRepresentation& rep, RngStream& rng) {
  StepCounter sc;
  PivotOutput out;
  ContractedView view = contract(rep, &sc);
  out.clustering = rep.clustering;
  if (view.empty()) {
    out.steps = static_cast<int64_t>(sc.steps);
    return out;
  }
  Clustering& work = out.clustering;

  WeightedSampler sampler;
  std::vector<char> remaining(view.weight.size(), 0);
  for (int64_t u : view.units) {
    sampler.insert(u, view.weight[static_cast<size_t>(u)]);
    remaining[static_cast<size_t>(u)] = 1;
    sc.add();
  }

  StampSet non_nbr(static_cast<size_t>(rep.n()));
  std::vector<int64_t> cluster_members;  // scratch for T

  while (!sampler.empty()) {
    int64_t pivot = sampler.sample_remove(rng);
    sc.add();
    remaining[static_cast<size_t>(pivot)] = 0;
    ClusterId pc = view.cluster_of(pivot, rep.clustering);
    int32_t pos = view.cluster_pos[static_cast<size_t>(pc)];

    cluster_members.clear();
    cluster_members.push_back(pivot);

    // Remaining out-neighbors join the pivot's cluster.
    if (!view.is_core(pivot)) {
      for (int64_t u : view.out_neighbors[static_cast<size_t>(pivot)]) {
        sc.add();
        if (remaining[static_cast<size_t>(u)]) cluster_members.push_back(u);
      }
    }

    // Remaining same-cluster units that are not non-neighbors join too;
    // the rest stay behind as the shrunken cluster list.
    non_nbr.clear();
    if (!view.is_core(pivot)) {
      for (int64_t u : view.in_non_neighbors[static_cast<size_t>(pivot)]) {
        sc.add();
        non_nbr.mark(static_cast<VertexId>(u));
      }
    }
    auto& lst = view.cluster_units[static_cast<size_t>(pos)];
    std::vector<int64_t> kept;
    kept.reserve(lst.size());
    for (int64_t u : lst) {
      sc.add();
      if (!remaining[static_cast<size_t>(u)] || u == pivot) continue;
      if (!view.is_core(u) && non_nbr.contains(static_cast<VertexId>(u)))
        kept.push_back(u);
      else
        cluster_members.push_back(u);
    }
    lst = std::move(kept);

    // A core keeps its cluster id; otherwise open a fresh one.
    bool has_core = false;
    for (int64_t u : cluster_members)
      if (view.is_core(u)) has_core = true;
    ClusterId target = has_core ? pc : work.make_cluster();

    for (int64_t u : cluster_members) {
      sc.add();
      if (u != pivot) {
        remaining[static_cast<size_t>(u)] = 0;
        sampler.remove(u);
      }
      if (view.is_core(u)) continue;  // core members already carry this id
      VertexId v = static_cast<VertexId>(u);
      if (work.label(v) != target) {
        work.move(v, target);
        out.move_log.push_back(v);
      }
    }
  }
  out.steps = static_cast<int64_t>(sc.steps);
  return out;
}

Clustering classic_pivot(const Graph& g, const std::vector<VertexId>& permutation) {
  std::vector<ClusterId> label(static_cast<size_t>(g.n()), kNoCluster);
  ClusterId k = 0;
  for (VertexId v : permutation) {
    if (label[static_cast<size_t>(v)] != kNoCluster) continue;
    label[static_cast<size_t>(v)] = k;
    for (VertexId u : g.neighbors(v))
      if (label[static_cast<size_t>(u)] == kNoCluster) label[static_cast<size_t>(u)] = k;
    ++k;
  }
  if (g.n() == 0) return Clustering::singletons(0);
  return Clustering::from_labels(label);
}

Clustering classic_pivot(const Graph& g, RngStream& rng) {
  std::vector<VertexId> perm(static_cast<size_t>(g.n()));
  std::iota(perm.begin(), perm.end(), 0);
  for (size_t i = perm.size(); i > 1; --i)
    std::swap(perm[i - 1], perm[static_cast<size_t>(rng.uniform_u64(i))]);
  return classic_pivot(g, perm);
}

ClusterRepresentation pivot_repeat(const ClusterRepresentation& rep, int32_t r, RngStream& rng) {
  ClusterRepresentation best = rep;
  for (int32_t i = 0; i < r; ++i) {
    PivotOutput po = pivot_cluster(rep, rng);
    auto cand = symmetric_difference_update(rep, po.clustering, po.move_log);
    if (cand && cand->rep.violation.size() < best.violation.size()) best = std::move(cand->rep);
  }
  return best;
}

}  // namespace ccdyn

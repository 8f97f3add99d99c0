#include "ccdyn/local_search.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ccdyn {

namespace {

double log2sq(double x) {
  double l = std::max(1.0, std::log2(std::max(1.0, x)));
  return l * l;
}

// Neighborhood marks of u in the fixed graph encoded by `base`.
void mark_neighbors(const ClusterRepresentation& base, VertexId u, StampSet& nbr, StampSet& scratch) {
  nbr.clear();
  base.for_neighbors(u, scratch, [&](VertexId w) { nbr.mark(w); });
}

// Weighted draw from static positive weights; O(log n) per draw.
class WeightedPicker {
 public:
  void add(VertexId v, double w) {
    ids_.push_back(v);
    total_ += w;
    prefix_.push_back(total_);
  }
  bool empty() const { return ids_.empty(); }
  double total() const { return total_; }
  VertexId pick(RngStream& rng) const {
    double r = rng.next_double() * total_;
    size_t i = static_cast<size_t>(std::lower_bound(prefix_.begin(), prefix_.end(), r) - prefix_.begin());
    if (i >= ids_.size()) i = ids_.size() - 1;
    return ids_[i];
  }

 private:
  std::vector<VertexId> ids_;
  std::vector<double> prefix_;
  double total_ = 0;
};

}  // namespace

double local_improvement(const Clustering& work, const std::vector<VertexId>& K,
                         const ClusterRepresentation& base, const WeightLayers& layers) {
  if (K.empty()) return 0.0;
  StampSet in_k(static_cast<size_t>(work.n()));
  for (VertexId v : K) in_k.mark(v);
  StampSet nbr(static_cast<size_t>(work.n())), scratch(static_cast<size_t>(work.n()));
  double delta = 0.0;
  for (size_t i = 0; i < K.size(); ++i) {
    VertexId u = K[i];
    mark_neighbors(base, u, nbr, scratch);
    for (size_t j = i + 1; j < K.size(); ++j) {
      VertexId x = K[j];
      bool edge = nbr.contains(x);
      double now = work.same(u, x) ? (edge ? 0.0 : 1.0) : (edge ? layers.edge_weight(u, x) : 0.0);
      double after = edge ? 0.0 : 1.0;
      delta += now - after;
    }
    work.for_members(work.label(u), [&](VertexId y) {
      if (y == u || in_k.contains(y)) return;
      bool edge = nbr.contains(y);
      delta += (edge ? 0.0 : 1.0) - (edge ? layers.edge_weight(u, y) : 0.0);
    });
  }
  return delta;
}

double local_improvement(const Clustering& work, const std::vector<VertexId>& K, const Graph& g) {
  ClusterRepresentation base = ClusterRepresentation::from(g, Clustering::singletons(g.n()));
  return local_improvement(work, K, base, WeightLayers{});
}

namespace {

// Marginal change of the insertion improvement when u joins candidate C.
double marginal_gain(const Clustering& work, const ClusterRepresentation& base,
                     const WeightLayers& layers, const std::vector<VertexId>& current,
                     const StampSet& in_c, VertexId u, StampSet& nbr, StampSet& scratch,
                     StepCounter& sc) {
  mark_neighbors(base, u, nbr, scratch);
  sc.add(static_cast<uint64_t>(base.deg(u)) + 1);
  double delta = 0.0;
  for (VertexId x : current) {
    sc.add();
    delta += nbr.contains(x) ? layers.edge_weight(u, x) : -1.0;
  }
  work.for_members(work.label(u), [&](VertexId y) {
    sc.add();
    if (y == u || in_c.contains(y)) return;
    delta += nbr.contains(y) ? -layers.edge_weight(u, y) : 1.0;
  });
  return delta;
}

struct PairRef {
  VertexId a, b;
  bool inside;  // candidate-internal pair vs boundary pair
};

// Improvement of inserting `members`, estimated from `gamma` pair samples.
// Falls back to exact enumeration when the budget covers every affected
// pair; otherwise subtracts a one-sided slack so that the estimate exceeds
// the true improvement with probability at most exp(-gamma).
double sampled_improvement(const Clustering& work, const ClusterRepresentation& base,
                           const WeightLayers& layers, const std::vector<VertexId>& members,
                           int64_t gamma, RngStream& rng, StepCounter& sc) {
  StampSet in_c(static_cast<size_t>(work.n()));
  for (VertexId v : members) in_c.mark(v);
  std::vector<PairRef> pairs;
  for (size_t i = 0; i < members.size(); ++i)
    for (size_t j = i + 1; j < members.size(); ++j) pairs.push_back({members[i], members[j], true});
  for (VertexId u : members) {
    work.for_members(work.label(u), [&](VertexId y) {
      if (y != u && !in_c.contains(y)) pairs.push_back({u, y, false});
    });
  }
  StampSet nbr(static_cast<size_t>(work.n())), scratch(static_cast<size_t>(work.n()));
  auto contribution = [&](const PairRef& p) {
    mark_neighbors(base, p.a, nbr, scratch);
    bool edge = nbr.contains(p.b);
    if (p.inside) {
      double now = work.same(p.a, p.b) ? (edge ? 0.0 : 1.0) : (edge ? layers.edge_weight(p.a, p.b) : 0.0);
      return now - (edge ? 0.0 : 1.0);
    }
    return (edge ? 0.0 : 1.0) - (edge ? layers.edge_weight(p.a, p.b) : 0.0);
  };
  int64_t s = static_cast<int64_t>(pairs.size());
  if (s == 0) return 0.0;
  if (gamma >= s) {
    double total = 0.0;
    for (const PairRef& p : pairs) {
      sc.add();
      total += contribution(p);
    }
    return total;
  }
  double sum = 0.0;
  for (int64_t i = 0; i < gamma; ++i) {
    sc.add();
    sum += contribution(pairs[static_cast<size_t>(rng.uniform_int(s))]);
  }
  double est_raw = static_cast<double>(s) * sum / static_cast<double>(gamma);
  double slack = std::sqrt(2.0) * layers.max_weight() * static_cast<double>(s);
  return est_raw - slack;
}

}  // namespace

CandidateCluster generate_cluster(VertexId pivot, const Clustering& work,
                                  const ClusterRepresentation& base, Preclustering& pre,
                                  const WeightLayers& layers, int64_t gamma, RngStream& rng,
                                  GenerateOptions opts) {
  StepCounter sc;
  CandidateCluster out;
  out.pivot = pivot;
  std::vector<VertexId> grown = pre.base_cluster(pivot);
  std::vector<VertexId> cand = pre.candidate_neighbors(pivot, rng);

  StampSet in_c(static_cast<size_t>(work.n()));
  for (VertexId v : grown) in_c.mark(v);
  StampSet nbr(static_cast<size_t>(work.n())), scratch(static_cast<size_t>(work.n()));

  double base_imp = opts.exact
                        ? local_improvement(work, grown, base, layers)
                        : sampled_improvement(work, base, layers, grown, gamma, rng, sc);

  // Rank candidates by their contribution against K(pivot) alone, then scan
  // prefixes, keeping every member pairwise admissible with the others.
  std::vector<std::pair<double, VertexId>> order;
  order.reserve(cand.size());
  for (VertexId u : cand) {
    double score = marginal_gain(work, base, layers, grown, in_c, u, nbr, scratch, sc);
    order.emplace_back(-score, u);
  }
  std::sort(order.begin(), order.end());

  double cur = base_imp, best = base_imp;
  size_t base_size = grown.size(), best_size = grown.size();
  std::vector<VertexId> singles;  // admitted singleton members
  for (auto& [neg_score, u] : order) {
    bool ok = true;
    for (VertexId s : singles) {
      sc.add();
      if (!(pre.params().exact ? pre.exact_admissible(u, s) : pre.check_admissible(u, s, rng))) {
        ok = false;
        break;
      }
    }
    if (!ok) continue;
    double d = marginal_gain(work, base, layers, grown, in_c, u, nbr, scratch, sc);
    grown.push_back(u);
    in_c.mark(u);
    singles.push_back(u);
    cur += d;
    if (cur > best) {
      best = cur;
      best_size = grown.size();
    }
  }
  grown.resize(best_size);
  std::sort(grown.begin() + static_cast<int64_t>(base_size), grown.end());
  std::sort(grown.begin(), grown.end());
  out.members = std::move(grown);
  if (opts.exact) {
    out.est_improvement = best;
    out.exact_improvement = best;
  } else {
    // Fresh one-sided estimate over the final candidate.
    out.est_improvement =
        sampled_improvement(work, base, layers, out.members, gamma, rng, sc);
  }
  return out;
}

LocalSearchResult local_search(const ClusterRepresentation& rep, Preclustering& pre, double eps,
                               RngStream& rng, const WeightLayers& layers,
                               LocalSearchOptions opts) {
  LocalSearchResult res;
  const int64_t d_in = rep.cost();
  if (d_in == 0) {
    res.rep = rep;
    return res;
  }
  const double eps_prime = eps / opts.eps_prime_divisor;
  const int64_t budget =
      static_cast<int64_t>(static_cast<double>(opts.budget_factor) * static_cast<double>(d_in + 1) /
                           eps_prime);
  StepCounter sc;

  Clustering work = opts.start ? *opts.start : rep.clustering;
  const Clustering& atoms = rep.clustering;

  // Clusters qualify as pivot sources when their cross-violation count is at
  // least a third of their size; everything else cannot gain admissible
  // partners.
  std::vector<int64_t> cross(static_cast<size_t>(atoms.cluster_ids()), 0);
  rep.violation.for_each([&](VertexId u, VertexId v) {
    sc.add();
    if (atoms.same(u, v)) return;
    ++cross[static_cast<size_t>(atoms.label(u))];
    ++cross[static_cast<size_t>(atoms.label(v))];
  });
  WeightedPicker pivots, singles;
  {
    StampSet seen_cluster(static_cast<size_t>(atoms.cluster_ids()));
    std::vector<VertexId> endpoints;
    StampSet seen_v(static_cast<size_t>(rep.n()));
    rep.violation.for_each([&](VertexId u, VertexId v) {
      for (VertexId x : {u, v})
        if (!seen_v.contains(x)) {
          seen_v.mark(x);
          endpoints.push_back(x);
        }
    });
    for (VertexId x : endpoints) {
      ClusterId cl = atoms.label(x);
      if (seen_cluster.contains(cl)) continue;
      seen_cluster.mark(cl);
      if (3 * cross[static_cast<size_t>(cl)] < atoms.size(cl)) continue;
      atoms.for_members(cl, [&](VertexId v) {
        sc.add();
        double d = rep.deg(v);
        if (d < 1) return;
        pivots.add(v, 1.0 / log2sq(d));
        if (atoms.size(cl) == 1) singles.add(v, d / log2sq(d));
      });
    }
  }

  std::vector<VertexId> move_log;
  StampSet moved(static_cast<size_t>(rep.n()));
  // A warm start counts as moves too; the final symmetric-difference update
  // must see every vertex whose label differs from the input clustering.
  if (opts.start) {
    for (VertexId v = 0; v < rep.n(); ++v)
      if (work.label(v) != rep.clustering.label(v)) {
        moved.mark(v);
        move_log.push_back(v);
      }
  }
  auto apply_cluster = [&](const std::vector<VertexId>& members) {
    ClusterId fresh = work.make_cluster();
    for (VertexId v : members) {
      sc.add();
      work.move(v, fresh);
      if (!moved.contains(v)) {
        moved.mark(v);
        move_log.push_back(v);
      }
    }
  };

  const int64_t rounds = std::max<int64_t>(
      1, static_cast<int64_t>(std::ceil(opts.round_multiplier * static_cast<double>(d_in))));
  bool tripped = false;
  for (;;) {
    double pass_improvement = 0.0;
    for (int64_t r = 0; r < rounds && !tripped; ++r) {
      sc.add();
      if (static_cast<int64_t>(sc.steps) > budget) {
        tripped = true;
        break;
      }
      if (rng.bernoulli(0.5)) {
        // Singleton detection: should some vertex leave its cluster?
        if (singles.empty()) continue;
        if (!rng.bernoulli(std::min(1.0, singles.total() / static_cast<double>(d_in)))) continue;
        VertexId v = singles.pick(rng);
        std::vector<VertexId> k{v};
        double imp = opts.exact_improvement
                         ? local_improvement(work, k, rep, layers)
                         : sampled_improvement(work, rep, layers, k,
                                               static_cast<int64_t>(log2sq(rep.deg(v))) + 8, rng, sc);
        sc.add(static_cast<uint64_t>(rep.deg(v)) + 1);
        if (imp > 0) {
          apply_cluster(k);
          pass_improvement += imp;
        }
      } else {
        if (pivots.empty()) continue;
        if (!rng.bernoulli(std::min(1.0, pivots.total() / static_cast<double>(d_in)))) continue;
        VertexId p = pivots.pick(rng);
        double dp = std::max(1, rep.deg(p));
        int64_t gamma = std::max<int64_t>(8, static_cast<int64_t>(std::ceil(dp * log2sq(dp))));
        CandidateCluster cc = generate_cluster(p, work, rep, pre, layers, gamma, rng,
                                               {.exact = opts.exact_improvement});
        sc.add(static_cast<uint64_t>(gamma));
        if (cc.est_improvement > 0) {
          apply_cluster(cc.members);
          pass_improvement += cc.est_improvement;
        }
      }
    }
    if (tripped || pass_improvement < eps_prime * static_cast<double>(d_in)) break;
  }

  res.steps = static_cast<int64_t>(sc.steps);
  if (tripped) {
    res.rep = rep;
    res.aborted = true;
    return res;
  }
  SymDiffResult sd = symmetric_difference_full(rep, work, move_log);
  if (sd.rep.violation.size() > d_in) {
    res.rep = rep;
    res.aborted = true;
    return res;
  }
  res.rep = std::move(sd.rep);
  return res;
}

int32_t separation_count(const std::vector<ClusterId>& l1, const std::vector<ClusterId>& l2,
                         const std::vector<ClusterId>& l3, VertexId u, VertexId v) {
  auto a = static_cast<size_t>(u), b = static_cast<size_t>(v);
  return (l1[a] != l1[b]) + (l2[a] != l2[b]) + (l3[a] != l3[b]);
}

int64_t triple_budget_sum(const Clustering& c1, const Clustering& c2, const Clustering& c3,
                          const Graph& g) {
  auto l1 = c1.dense_labels(), l2 = c2.dense_labels(), l3 = c3.dense_labels();
  int64_t total = 0;
  for (VertexId u = 0; u < g.n(); ++u)
    for (VertexId v = u + 1; v < g.n(); ++v) {
      int32_t d = separation_count(l1, l2, l3, u, v);
      total += g.has_edge(u, v) ? kBudgetPlus[d] : kBudgetMinus[d];
    }
  return total;
}

int64_t triple_budget_bound(const Clustering& c1, const Clustering& c2, const Clustering& c3,
                            const Graph& g) {
  const Clustering* cs[3] = {&c1, &c2, &c3};
  int64_t total = 0;
  for (const Clustering* c : cs) {
    for (VertexId u = 0; u < g.n(); ++u)
      for (VertexId v = u + 1; v < g.n(); ++v)
        if (c->same(u, v) && !g.has_edge(u, v)) ++total;  // missing pairs
  }
  for (int i = 0; i < 3; ++i)
    for (int j = i + 1; j < 3; ++j) {
      for (VertexId u = 0; u < g.n(); ++u)
        for (VertexId v : g.neighbors(u))
          if (u < v && !cs[i]->same(u, v) && !cs[j]->same(u, v)) ++total;  // cut by both
    }
  return total;
}

Clustering triple_pivot_random(const Clustering& c1, const Clustering& c2, const Clustering& c3,
                               const Graph& g, RngStream& rng) {
  const int32_t n = g.n();
  if (n == 0) return Clustering::singletons(0);
  auto l1 = c1.dense_labels(), l2 = c2.dense_labels(), l3 = c3.dense_labels();
  std::vector<ClusterId> label(static_cast<size_t>(n), kNoCluster);
  std::vector<VertexId> remaining(static_cast<size_t>(n));
  for (VertexId v = 0; v < n; ++v) remaining[static_cast<size_t>(v)] = v;
  StampSet nbr(static_cast<size_t>(n));
  ClusterId k = 0;
  while (!remaining.empty()) {
    size_t pi = static_cast<size_t>(rng.uniform_int(static_cast<int64_t>(remaining.size())));
    VertexId u = remaining[pi];
    nbr.clear();
    for (VertexId w : g.neighbors(u)) nbr.mark(w);
    std::vector<VertexId> keep;
    keep.reserve(remaining.size());
    label[static_cast<size_t>(u)] = k;
    for (VertexId v : remaining) {
      if (v == u) continue;
      int32_t d = separation_count(l1, l2, l3, u, v);
      bool join;
      if (nbr.contains(v)) {
        join = d <= 1 || rng.bernoulli(0.25);
      } else {
        join = d <= 1 || (d == 2 && rng.bernoulli(0.75));
      }
      if (join)
        label[static_cast<size_t>(v)] = k;
      else
        keep.push_back(v);
    }
    remaining = std::move(keep);
    ++k;
  }
  return Clustering::from_labels(label);
}

int32_t iterated_round_count(double alpha) {
  if (!(alpha >= 0 && alpha < 0.2)) throw std::invalid_argument("alpha must lie in [0, 1/5)");
  return 1 + static_cast<int32_t>(std::ceil(2.0 / (0.2 - alpha)));
}

LocalSearchResult iterated_flipping(const ClusterRepresentation& rep, Preclustering& pre,
                                    double eps, RngStream& rng, IteratedOptions opts) {
  LocalSearchResult best;
  const int64_t d_in = rep.cost();
  if (d_in == 0) {
    best.rep = rep;
    return best;
  }
  Graph g = rep.reconstruct_graph();  // bookkeeping for the triple pivot and cost checks
  const int32_t s = iterated_round_count(opts.alpha);

  LocalSearchResult prev = local_search(rep, pre, eps, rng, {}, opts.ls);
  best = prev;

  for (int32_t i = 1; i <= s && best.rep.cost() > 0; ++i) {
    WeightLayers wi;
    wi.add_layer(prev.rep.clustering);
    LocalSearchResult ci = local_search(rep, pre, eps, rng, wi, opts.ls);

    WeightLayers wip = wi;
    wip.add_layer(ci.rep.clustering);
    LocalSearchResult cip = local_search(rep, pre, eps, rng, wip, opts.ls);

    Clustering cpp =
        triple_pivot_random(prev.rep.clustering, ci.rep.clustering, cip.rep.clustering, g, rng);
    int64_t cpp_cost = clustering_cost(g, cpp);

    if (ci.rep.cost() < best.rep.cost()) best = ci;
    if (cip.rep.cost() < best.rep.cost()) best = cip;
    if (cpp_cost < best.rep.cost()) {
      best.rep = ClusterRepresentation::from(g, cpp);
      best.aborted = false;
    }
    prev = std::move(cip);
  }

  // Unweighted polish so the winner is itself a local optimum.
  if (best.rep.cost() > 0) {
    LocalSearchOptions po = opts.ls;
    po.start = &best.rep.clustering;
    LocalSearchResult polished = local_search(rep, pre, eps, rng, {}, po);
    if (!polished.aborted && polished.rep.cost() <= best.rep.cost()) best = polished;
  }
  return best;
}

double epsilon_good_total(const Clustering& c, const Clustering& opt, const Graph& g) {
  ClusterRepresentation base = ClusterRepresentation::from(g, Clustering::singletons(g.n()));
  double total = 0.0;
  std::vector<char> seen(static_cast<size_t>(opt.cluster_ids()), 0);
  for (VertexId v = 0; v < g.n(); ++v) {
    ClusterId cl = opt.label(v);
    if (seen[static_cast<size_t>(cl)]) continue;
    seen[static_cast<size_t>(cl)] = 1;
    auto mem = opt.members(cl);
    std::sort(mem.begin(), mem.end());
    total += std::max(0.0, local_improvement(c, mem, base, WeightLayers{}));
  }
  return total;
}

bool epsilon_good_check(const Clustering& c, const Clustering& opt, const Graph& g, double eps,
                        int64_t d_size) {
  return epsilon_good_total(c, opt, g) <= eps * static_cast<double>(d_size) + 1e-9;
}

}  // namespace ccdyn

#include "ccdyn/cluster_lp.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <stdexcept>

#include "ccdyn/pivot.hpp"
#include "ccdyn/sampling.hpp"

namespace ccdyn {

void FractionalSolution::rebuild_index() {
  sets_of.assign(static_cast<size_t>(n), {});
  for (size_t i = 0; i < support.size(); ++i)
    for (VertexId v : support[i].members)
      sets_of[static_cast<size_t>(v)].push_back(static_cast<int32_t>(i));
}

void FractionalSolution::normalize() {
  for (auto& e : support) std::sort(e.members.begin(), e.members.end());
  std::sort(support.begin(), support.end(),
            [](const Entry& a, const Entry& b) { return a.members < b.members; });
  std::vector<Entry> merged;
  for (auto& e : support) {
    if (e.z <= 0) continue;
    if (!merged.empty() && merged.back().members == e.members)
      merged.back().z += e.z;
    else
      merged.push_back(std::move(e));
  }
  support = std::move(merged);
  rebuild_index();
}

double FractionalSolution::coverage(VertexId v) const {
  double c = 0;
  for (int32_t i : sets_of[static_cast<size_t>(v)]) c += support[static_cast<size_t>(i)].z;
  return c;
}

double FractionalSolution::x(VertexId u, VertexId v) const {
  const auto& a = sets_of[static_cast<size_t>(u)];
  const auto& b = sets_of[static_cast<size_t>(v)];
  double both = 0;
  size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] == b[j]) {
      both += support[static_cast<size_t>(a[i])].z;
      ++i;
      ++j;
    } else if (a[i] < b[j]) {
      ++i;
    } else {
      ++j;
    }
  }
  return std::clamp(1.0 - both, 0.0, 1.0);
}

double FractionalSolution::covering_objective(const ClusterRepresentation& rep) const {
  double obj = 0;
  for (const auto& e : support) obj += e.z * cover_cost(e.members, rep);
  return obj;
}

FractionalSolution FractionalSolution::atoms_indicator(const ClusterRepresentation& rep) {
  FractionalSolution z;
  z.n = rep.n();
  const Clustering& c = rep.clustering;
  std::vector<char> seen(static_cast<size_t>(c.cluster_ids()), 0);
  for (VertexId v = 0; v < rep.n(); ++v) {
    ClusterId cl = c.label(v);
    if (seen[static_cast<size_t>(cl)]) continue;
    seen[static_cast<size_t>(cl)] = 1;
    FractionalSolution::Entry e;
    e.members = c.members(cl);
    std::sort(e.members.begin(), e.members.end());
    e.z = 1.0;
    z.support.push_back(std::move(e));
  }
  z.normalize();
  return z;
}

void write_fractional(const FractionalSolution& z, std::ostream& out) {
  out << z.n << ' ' << z.support.size() << '\n';
  for (const auto& e : z.support) {
    out << e.z << ' ' << e.members.size();
    for (VertexId v : e.members) out << ' ' << v;
    out << '\n';
  }
}

FractionalSolution read_fractional(std::istream& in) {
  FractionalSolution z;
  int64_t k;
  if (!(in >> z.n >> k)) throw std::runtime_error("fractional solution: bad header");
  for (int64_t i = 0; i < k; ++i) {
    FractionalSolution::Entry e;
    int64_t sz;
    if (!(in >> e.z >> sz)) throw std::runtime_error("fractional solution: bad entry");
    for (int64_t j = 0; j < sz; ++j) {
      int64_t v;
      if (!(in >> v)) throw std::runtime_error("fractional solution: truncated entry");
      e.members.push_back(static_cast<VertexId>(v));
    }
    z.support.push_back(std::move(e));
  }
  z.normalize();
  return z;
}

double cover_cost(const std::vector<VertexId>& members, const ClusterRepresentation& rep) {
  if (members.empty()) return 0.0;
  StampSet in_s(static_cast<size_t>(rep.n())), scratch(static_cast<size_t>(rep.n()));
  for (VertexId v : members) in_s.mark(v);
  int64_t deg_sum = 0, inside2 = 0, d_cross = 0;
  for (VertexId v : members) {
    deg_sum += rep.deg(v);
    d_cross += rep.violation.incident_count(v);
    rep.for_neighbors(v, scratch, [&](VertexId w) {
      if (in_s.contains(w)) ++inside2;
    });
  }
  int64_t s = static_cast<int64_t>(members.size());
  // cost = cut/2 + missing = (deg_sum - inside2)/2 + (s(s-1)/2 - inside2/2)
  double cost = 0.5 * static_cast<double>(deg_sum - inside2) +
                0.5 * static_cast<double>(s * (s - 1) - inside2);
  return cost + static_cast<double>(d_cross);
}

namespace {

double log2sq(double x) {
  double l = std::max(1.0, std::log2(std::max(1.0, x)));
  return l * l;
}

// Incremental cover bookkeeping while a candidate grows.
struct GrowState {
  const ClusterRepresentation* rep;
  StampSet in_s, scratch;
  int64_t size = 0;
  double cover = 0;

  explicit GrowState(const ClusterRepresentation& r)
      : rep(&r), in_s(static_cast<size_t>(r.n())), scratch(static_cast<size_t>(r.n())) {}

  int64_t edges_into(VertexId u) const {
    int64_t e = 0;
    rep->for_neighbors(u, const_cast<StampSet&>(scratch), [&](VertexId w) {
      if (in_s.contains(w)) ++e;
    });
    return e;
  }
  double marginal(VertexId u) const {
    int64_t e = edges_into(u);
    return 0.5 * static_cast<double>(rep->deg(u)) + static_cast<double>(size) -
           2.0 * static_cast<double>(e) + static_cast<double>(rep->violation.incident_count(u));
  }
  void add(VertexId u) {
    cover += marginal(u);
    in_s.mark(u);
    ++size;
  }
};

}  // namespace

std::optional<std::vector<VertexId>> find_small_ratio_cluster(
    VertexId v, const std::vector<double>& p_hat, double ratio, const ClusterRepresentation& rep,
    Preclustering& pre, RngStream& rng, int64_t t, const LpOptions& opts) {
  std::vector<VertexId> base = pre.base_cluster(v);
  double p_base = 0;
  for (VertexId w : base) p_base += p_hat[static_cast<size_t>(w)];
  if (!(p_base > 0)) return std::nullopt;

  GrowState grow(rep);
  for (VertexId w : base) grow.add(w);

  std::vector<VertexId> cand;
  for (VertexId w : pre.candidate_neighbors(v, rng))
    if (p_hat[static_cast<size_t>(w)] > 0) cand.push_back(w);

  std::vector<std::pair<double, VertexId>> order;
  order.reserve(cand.size());
  for (VertexId w : cand)
    order.emplace_back(grow.marginal(w) / p_hat[static_cast<size_t>(w)], w);
  std::sort(order.begin(), order.end());

  // Scan prefixes and remember the best ratio seen.
  std::vector<VertexId> grown = base;
  double p_cur = p_base;
  double best_ratio = grow.cover / p_cur;
  size_t best_size = grown.size();
  for (auto& [score, w] : order) {
    grow.add(w);
    grown.push_back(w);
    p_cur += p_hat[static_cast<size_t>(w)];
    double r = grow.cover / p_cur;
    if (r < best_ratio) {
      best_ratio = r;
      best_size = grown.size();
    }
  }
  grown.resize(best_size);
  std::sort(grown.begin(), grown.end());

  // Verify the chosen prefix.
  double p_final = 0;
  for (VertexId w : grown) p_final += p_hat[static_cast<size_t>(w)];
  if (opts.exact_generator) {
    double cover = cover_cost(grown, rep);
    if (cover <= ratio * p_final + 1e-12) return grown;
    return std::nullopt;
  }
  // Sampled verification: estimate the internal edge count from t pair
  // samples; the margin keeps cover overestimated except with probability
  // exp(-t).
  int64_t s = static_cast<int64_t>(grown.size());
  int64_t pairs = s * (s - 1) / 2;
  int64_t deg_sum = 0, d_cross = 0;
  for (VertexId w : grown) {
    deg_sum += rep.deg(w);
    d_cross += rep.violation.incident_count(w);
  }
  double e_est;
  double margin = 0;
  if (t >= pairs || pairs == 0) {
    e_est = 0;
    StampSet in_s(static_cast<size_t>(rep.n())), scratch(static_cast<size_t>(rep.n()));
    for (VertexId w : grown) in_s.mark(w);
    for (VertexId w : grown)
      rep.for_neighbors(w, scratch, [&](VertexId u) {
        if (in_s.contains(u)) e_est += 0.5;
      });
  } else {
    StampSet scratch(static_cast<size_t>(rep.n())), nbr(static_cast<size_t>(rep.n()));
    int64_t hits = 0;
    for (int64_t i = 0; i < t; ++i) {
      int64_t pi = rng.uniform_int(pairs);
      // Unrank the pair index.
      int64_t a = 0;
      while (pi >= s - 1 - a) {
        pi -= s - 1 - a;
        ++a;
      }
      int64_t b = a + 1 + pi;
      nbr.clear();
      rep.for_neighbors(grown[static_cast<size_t>(a)], scratch, [&](VertexId u) { nbr.mark(u); });
      if (nbr.contains(grown[static_cast<size_t>(b)])) ++hits;
    }
    e_est = static_cast<double>(pairs) * static_cast<double>(hits) / static_cast<double>(t);
    double lambda = static_cast<double>(pairs) *
                    std::sqrt(static_cast<double>(t) / 2.0) / static_cast<double>(t);
    margin = 2.0 * lambda;  // cover decreases by 2 per internal edge
  }
  double cover_est = 0.5 * static_cast<double>(deg_sum) - 2.0 * e_est +
                     0.5 * static_cast<double>(s * (s - 1)) + static_cast<double>(d_cross) + margin;
  if (cover_est <= ratio * p_final + 1e-12) return grown;
  return std::nullopt;
}

std::optional<FractionalSolution> find_disjoint_family(const ClusterRepresentation& rep,
                                                       Preclustering& pre,
                                                       const std::vector<double>& p, double R,
                                                       RngStream& rng, const LpOptions& opts) {
  const int32_t n = rep.n();
  const Clustering& atoms = rep.clustering;
  std::vector<double> p_hat = p;
  double d_cross_total = 2.0 * static_cast<double>(rep.violation.size());

  std::vector<std::vector<VertexId>> family;
  double family_p = 0;
  const double gamma = opts.gamma;

  auto zero_cluster = [&](VertexId v) {
    atoms.for_members(atoms.label(v), [&](VertexId w) { p_hat[static_cast<size_t>(w)] = 0; });
  };

  // Negligible-weight vertices drop out up front.
  for (VertexId v = 0; v < n; ++v) {
    if (p_hat[static_cast<size_t>(v)] > 0 && d_cross_total > 0 &&
        p[static_cast<size_t>(v)] <=
            gamma * static_cast<double>(rep.violation.incident_count(v)) / (4.0 * d_cross_total)) {
      zero_cluster(v);
    }
  }

  {
    // Candidate pivots: vertices that still carry weight. The gamma floor is
    // the success requirement; the loop keeps growing the family past it
    // (the z values only shrink below the 1/gamma box), which keeps the
    // averaged solution covering and the atom fix cheap.
    std::vector<VertexId> cands;
    std::vector<double> weights;
    double total_w = 0;
    for (VertexId v = 0; v < n; ++v) {
      if (p_hat[static_cast<size_t>(v)] <= 0) continue;
      cands.push_back(v);
      double w = 1.0 / log2sq(std::max(1, rep.deg(v)));
      weights.push_back(w);
      total_w += w;
    }
    std::vector<double> prefix(weights.size());
    double acc = 0;
    for (size_t i = 0; i < weights.size(); ++i) {
      acc += weights[i];
      prefix[i] = acc;
    }
    int64_t n_c = static_cast<int64_t>(cands.size());
    int64_t rounds = 4 * std::max<int64_t>(n_c, 1);
    for (int64_t i = 0; i < rounds && n_c > 0; ++i) {
      if (!rng.bernoulli(std::min(1.0, total_w / static_cast<double>(n_c)))) continue;
      double r = rng.next_double() * acc;
      size_t idx = static_cast<size_t>(std::lower_bound(prefix.begin(), prefix.end(), r) - prefix.begin());
      if (idx >= cands.size()) idx = cands.size() - 1;
      VertexId v = cands[idx];
      if (p_hat[static_cast<size_t>(v)] <= 0) continue;
      double d_adm = std::max<double>(1.0, static_cast<double>(pre.candidate_neighbors(v, rng).size()));
      int64_t t = std::max<int64_t>(8, static_cast<int64_t>(std::ceil(d_adm * log2sq(d_adm))));
      auto cl = find_small_ratio_cluster(v, p_hat, (1.0 + 3.0 * gamma) * R, rep, pre, rng, t, opts);
      if (!cl) continue;
      std::vector<VertexId> members;
      double pc = 0;
      for (VertexId w : *cl) {
        if (p_hat[static_cast<size_t>(w)] > 0) {
          members.push_back(w);
          pc += p[static_cast<size_t>(w)];
          p_hat[static_cast<size_t>(w)] = 0;
        }
      }
      if (members.empty()) continue;
      family.push_back(std::move(members));
      family_p += pc;
    }
  }

  // Leftover base clusters that are cheap on their own join at the looser
  // threshold; running this sweep after the growth loop keeps it from
  // swallowing vertices that better clusters could claim.
  for (VertexId v = 0; v < n; ++v) {
    if (p_hat[static_cast<size_t>(v)] <= 0) continue;
    std::vector<VertexId> k = pre.base_cluster(v);
    double pk = 0;
    for (VertexId w : k) pk += p[static_cast<size_t>(w)];
    if (pk > 0 && cover_cost(k, rep) <= (1.0 + 6.0 * gamma) * R * pk) {
      family.push_back(std::move(k));
      family_p += pk;
      zero_cluster(v);
    }
  }

  if (family_p <= gamma) return std::nullopt;
  FractionalSolution z;
  z.n = n;
  for (auto& s : family) {
    FractionalSolution::Entry e;
    e.members = std::move(s);
    e.z = 1.0 / family_p;
    z.support.push_back(std::move(e));
  }
  z.normalize();
  return z;
}

MwuResult mwu_solve(const ClusterRepresentation& rep, Preclustering& pre, RngStream& rng,
                    const LpOptions& opts) {
  MwuResult res;
  const int32_t n = rep.n();
  const int64_t d = rep.violation.size();
  const double gamma = opts.gamma;

  // Feasibility fix (atom entries for undercovered vertices) plus the
  // scale-up; the atoms indicator is already covering and skips both.
  auto repair = [&](FractionalSolution z) {
    z.normalize();
    StampSet fixed(static_cast<size_t>(rep.clustering.cluster_ids()));
    std::vector<std::vector<VertexId>> fixes;
    for (VertexId v = 0; v < n; ++v) {
      if (z.coverage(v) <= 1.0 - 2.0 * gamma) {
        ClusterId cl = rep.clustering.label(v);
        if (!fixed.contains(cl)) {
          fixed.mark(cl);
          fixes.push_back(pre.base_cluster(v));
        }
      }
    }
    for (auto& k : fixes) {
      std::sort(k.begin(), k.end());
      bool found = false;
      for (auto& e : z.support)
        if (e.members == k) {
          e.z = 1.0;
          found = true;
          break;
        }
      if (!found) z.support.push_back({k, 1.0});
    }
    z.normalize();
    for (auto& e : z.support) e.z /= (1.0 - 2.0 * gamma);
    z.rebuild_index();
    return z;
  };

  auto finish = [&](FractionalSolution z, bool degenerate, double r_used) {
    res.z = std::move(z);
    res.degenerate = degenerate;
    res.r_used = r_used;
    res.delta_measured = 0;
    for (const auto& e : res.z.support)
      res.delta_measured = res.delta_measured == 0 ? e.z : std::min(res.delta_measured, e.z);
    for (VertexId v = 0; v < n; ++v)
      res.max_sets_per_vertex =
          std::max(res.max_sets_per_vertex, static_cast<int32_t>(res.z.sets_of[static_cast<size_t>(v)].size()));
    // Atom structure: splits are hard errors, joins are reported.
    StampSet seen(static_cast<size_t>(rep.clustering.cluster_ids()));
    for (const auto& e : res.z.support) {
      seen.clear();
      int32_t atoms_covered = 0;
      StampMap<int32_t> count(static_cast<size_t>(rep.clustering.cluster_ids()));
      for (VertexId v : e.members) {
        ClusterId cl = rep.clustering.label(v);
        ++count.ref(cl);
        if (!seen.contains(cl)) {
          seen.mark(cl);
          if (rep.clustering.size(cl) > 1) ++atoms_covered;
        }
      }
      for (VertexId v : e.members) {
        ClusterId cl = rep.clustering.label(v);
        if (rep.clustering.size(cl) > 1 && count.get(cl) != rep.clustering.size(cl))
          res.atoms_split = true;
      }
      if (atoms_covered > 1) ++res.atom_joins;
    }
    return res;
  };

  if (d == 0) return finish(FractionalSolution::atoms_indicator(rep), false, 0.0);

  std::vector<double> d_cross(static_cast<size_t>(n));
  double d_cross_total = 0;
  for (VertexId v = 0; v < n; ++v) {
    d_cross[static_cast<size_t>(v)] = static_cast<double>(rep.violation.incident_count(v));
    d_cross_total += d_cross[static_cast<size_t>(v)];
  }

  // Ratio guesses sweep geometrically across [|D|/4, 3(1+gamma)|D|]; the
  // true covering optimum lies within [2|D|, 3|D|]. Low guesses fail fast;
  // among the successful guesses the best covering objective wins (larger
  // ratios admit fuller families, which shrinks the feasibility fix).
  double r_low = std::max(1.0, static_cast<double>(d) / 4.0);
  double r_high = 3.0 * (1.0 + gamma) * static_cast<double>(d);
  std::optional<FractionalSolution> best;
  double best_obj = 0, best_r = 0;
  for (double R = r_low; R <= r_high; R *= (1.0 + gamma)) {
    std::vector<double> w = d_cross;
    std::vector<FractionalSolution> rounds;
    bool ok = true;
    for (int32_t t = 0; t < opts.t_mw && ok; ++t) {
      double wsum = 0;
      for (double x : w) wsum += x;
      std::vector<double> p(w.size());
      for (size_t i = 0; i < w.size(); ++i) p[i] = w[i] / wsum;
      // Weight-band invariants.
      for (VertexId v = 0; v < n; ++v) {
        double bound = 16.0 * d_cross[static_cast<size_t>(v)] / d_cross_total;
        if (p[static_cast<size_t>(v)] > bound + 1e-12) res.invariant_upper_ok = false;
        double lower = gamma * opts.eps / 16.0 * d_cross[static_cast<size_t>(v)] / d_cross_total;
        if (p[static_cast<size_t>(v)] + 1e-12 < lower) res.invariant_lower_ok = false;
      }
      auto fam = find_disjoint_family(rep, pre, p, R, rng, opts);
      if (!fam) {
        ok = false;
        break;
      }
      for (VertexId v = 0; v < n; ++v) {
        double m = fam->coverage(v) - 1.0;
        w[static_cast<size_t>(v)] *= std::exp(-gamma * gamma * gamma * m);
      }
      rounds.push_back(std::move(*fam));
    }
    if (!ok) continue;
    FractionalSolution avg;
    avg.n = n;
    for (auto& r : rounds)
      for (auto& e : r.support)
        avg.support.push_back({std::move(e.members), e.z / static_cast<double>(opts.t_mw)});
    FractionalSolution fixed = repair(std::move(avg));
    double obj = fixed.covering_objective(rep);
    if (!best || obj < best_obj) {
      best = std::move(fixed);
      best_obj = obj;
      best_r = R;
    }
  }
  if (best) {
    // The integral representation is itself covering-feasible; keep it only
    // when no averaged solution beats its objective.
    FractionalSolution atoms = FractionalSolution::atoms_indicator(rep);
    if (atoms.covering_objective(rep) < best_obj) return finish(std::move(atoms), false, best_r);
    return finish(std::move(*best), false, best_r);
  }
  return finish(FractionalSolution::atoms_indicator(rep), true, 0.0);
}

Clustering cluster_based_rounding(const FractionalSolution& z, RngStream& rng) {
  const int32_t n = z.n;
  constexpr double kC = 3.0;
  double nc = std::pow(std::max(2.0, static_cast<double>(n)), kC);
  std::vector<int64_t> k_s(z.support.size());
  for (size_t i = 0; i < z.support.size(); ++i) {
    double p = rng.next_double_pos();
    k_s[i] = static_cast<int64_t>(std::floor(nc / z.support[i].z * std::log(1.0 / p)));
  }
  std::vector<int64_t> k_v(static_cast<size_t>(n), INT64_MAX);
  for (VertexId v = 0; v < n; ++v)
    for (int32_t i : z.sets_of[static_cast<size_t>(v)])
      k_v[static_cast<size_t>(v)] = std::min(k_v[static_cast<size_t>(v)], k_s[static_cast<size_t>(i)]);
  // Group equal k values; uncovered vertices (if any) stay singletons.
  std::vector<std::pair<int64_t, VertexId>> order;
  order.reserve(static_cast<size_t>(n));
  for (VertexId v = 0; v < n; ++v) order.emplace_back(k_v[static_cast<size_t>(v)], v);
  std::sort(order.begin(), order.end());
  std::vector<ClusterId> label(static_cast<size_t>(n), 0);
  ClusterId next = 0;
  for (size_t i = 0; i < order.size(); ++i) {
    if (i > 0 && (order[i].first != order[i - 1].first || order[i].first == INT64_MAX)) ++next;
    label[static_cast<size_t>(order[i].second)] = next;
  }
  if (n == 0) return Clustering::singletons(0);
  return Clustering::from_labels(label);
}

Clustering pivot_based_rounding(const FractionalSolution& z, const ClusterRepresentation& rep,
                                RngStream& rng) {
  const int32_t n = rep.n();
  const Clustering& base = rep.clustering;
  Clustering work = base;
  ContractedView view = contract(rep);
  if (view.empty() && z.support.empty()) return work;

  // Unit bookkeeping; broken cores re-enter as unit-weight vertices.
  WeightedSampler sampler;
  std::vector<char> remaining(view.weight.size(), 0);
  for (int64_t u : view.units) {
    sampler.insert(u, view.weight[static_cast<size_t>(u)]);
    remaining[static_cast<size_t>(u)] = 1;
  }
  std::vector<char> core_broken(view.core_cluster.size(), 0);
  StampSet decided(static_cast<size_t>(n));
  StampSet nbr(static_cast<size_t>(n)), scratch(static_cast<size_t>(n)), in_cluster(static_cast<size_t>(n));
  int64_t decided_cost = 0;
  const int64_t d = rep.violation.size();

  auto core_members = [&](ClusterId cl) {
    std::vector<VertexId> out;
    base.for_members(cl, [&](VertexId v) {
      if (rep.violation.incident_count(v) == 0) out.push_back(v);
    });
    std::sort(out.begin(), out.end());
    return out;
  };
  auto break_core = [&](int64_t core_unit) {
    size_t ci = static_cast<size_t>(core_unit - view.n);
    if (core_broken[ci]) return;
    core_broken[ci] = 1;
    remaining[static_cast<size_t>(core_unit)] = 0;
    sampler.remove(core_unit);
    int32_t pos = view.cluster_pos[static_cast<size_t>(view.core_cluster[ci])];
    auto& lst = view.cluster_units[static_cast<size_t>(pos)];
    lst.erase(std::remove(lst.begin(), lst.end(), core_unit), lst.end());
    for (VertexId v : core_members(view.core_cluster[ci])) {
      sampler.insert(v, 1);
      if (static_cast<size_t>(v) >= remaining.size()) remaining.resize(static_cast<size_t>(v) + 1);
      remaining[static_cast<size_t>(v)] = 1;
      lst.push_back(v);
    }
  };
  auto unit_rep_vertex = [&](int64_t u) -> VertexId {
    if (!view.is_core(u)) return static_cast<VertexId>(u);
    return core_members(view.core_cluster[static_cast<size_t>(u - view.n)]).front();
  };
  auto unit_of_vertex = [&](VertexId v) -> int64_t {
    if (rep.violation.incident_count(v) > 0) return v;  // active: own unit
    ClusterId cl = base.label(v);
    int32_t pos = cl < static_cast<ClusterId>(view.cluster_pos.size())
                      ? view.cluster_pos[static_cast<size_t>(cl)]
                      : -1;
    if (pos < 0) return -1;  // inactive cluster: not part of the view
    int64_t cu = view.core_unit_of[static_cast<size_t>(pos)];
    if (cu >= 0 && !core_broken[static_cast<size_t>(cu - view.n)]) return cu;
    return v;  // core already broken: the vertex is its own unit
  };

  while (!sampler.empty()) {
    int64_t pu = sampler.sample_remove(rng);
    remaining[static_cast<size_t>(pu)] = 0;
    VertexId pr = unit_rep_vertex(pu);
    ClusterId pc = base.label(pr);
    int32_t pos = view.cluster_pos[static_cast<size_t>(pc)];

    // Neighbor units: same-cluster units minus non-neighbors, plus
    // cross-violation partners.
    nbr.clear();
    if (rep.violation.incident_count(pr) > 0)
      for (int64_t idx : rep.violation.incident(pr)) nbr.mark(rep.violation.other(idx, pr));

    std::vector<int64_t> cluster_now;
    std::vector<int64_t> neighbor_units;
    {
      auto& lst = view.cluster_units[static_cast<size_t>(pos)];
      std::vector<int64_t> kept;
      for (int64_t u : lst) {
        if (!remaining[static_cast<size_t>(u)]) continue;
        kept.push_back(u);
      }
      lst = kept;
      for (int64_t u : kept) {
        VertexId ur = unit_rep_vertex(u);
        if (base.label(ur) == pc && !(view.is_core(u) ? false : nbr.contains(static_cast<VertexId>(u))))
          neighbor_units.push_back(u);  // same cluster, not a missing pair
      }
    }
    if (rep.violation.incident_count(pr) > 0) {
      for (int64_t idx : rep.violation.incident(pr)) {
        VertexId w = rep.violation.other(idx, pr);
        if (base.label(w) == pc) continue;  // missing pair, handled above
        if (remaining[static_cast<size_t>(w)]) neighbor_units.push_back(w);  // cross edge: active vertex
      }
    }

    std::vector<int64_t> cluster_units{pu};
    StampSet taken(static_cast<size_t>(view.weight.size() + 8));
    auto take = [&](int64_t u) {
      if (static_cast<size_t>(u) < remaining.size() && remaining[static_cast<size_t>(u)] &&
          !taken.contains(static_cast<VertexId>(u))) {
        taken.mark(static_cast<VertexId>(u));
        cluster_units.push_back(u);
      }
    };

    // Threshold rule on neighbors.
    for (int64_t u : neighbor_units) {
      VertexId ur = unit_rep_vertex(u);
      if (z.x(pr, ur) <= 1.0 / 3.0 + 1e-12) take(u);
    }
    // Non-neighbors reachable through the pivot's support sets.
    StampSet considered(static_cast<size_t>(n));
    for (int32_t si : z.sets_of[static_cast<size_t>(pr)]) {
      for (VertexId m : z.support[static_cast<size_t>(si)].members) {
        if (m == pr || considered.contains(m)) continue;
        considered.mark(m);
        // Neighbor of the pivot? Same cluster without a violation, or a
        // cross-violation partner.
        bool is_nbr = (base.label(m) == pc) ? !nbr.contains(m) : nbr.contains(m);
        if (is_nbr) continue;
        double padd = 1.0 - z.x(pr, m);
        if (padd <= 0) continue;
        int64_t mu = unit_of_vertex(m);
        if (mu < 0) continue;
        if (!remaining[static_cast<size_t>(mu)] && !(view.is_core(mu) || mu == m)) continue;
        if (view.is_core(mu)) {
          if (!remaining[static_cast<size_t>(mu)]) continue;
          if (padd >= 1.0) {
            take(mu);
          } else {
            // Partial selection splits the core: break it and coin-flip the
            // members individually.
            break_core(mu);
            for (VertexId cm : core_members(base.label(m))) {
              if (remaining[static_cast<size_t>(cm)] && rng.bernoulli(padd)) take(cm);
            }
          }
        } else {
          if (remaining[static_cast<size_t>(mu)] && rng.bernoulli(padd)) take(mu);
        }
      }
    }
    // Draw a support set with the pivot's normalized weights and absorb its
    // remaining neighbor members.
    double zu = z.coverage(pr);
    if (zu > 0 && !z.sets_of[static_cast<size_t>(pr)].empty()) {
      double r = rng.next_double() * zu;
      int32_t chosen = z.sets_of[static_cast<size_t>(pr)].back();
      for (int32_t si : z.sets_of[static_cast<size_t>(pr)]) {
        double w = z.support[static_cast<size_t>(si)].z;
        if (r < w) {
          chosen = si;
          break;
        }
        r -= w;
      }
      for (VertexId m : z.support[static_cast<size_t>(chosen)].members) {
        if (m == pr) continue;
        bool is_nbr = (base.label(m) == pc) ? !nbr.contains(m) : nbr.contains(m);
        if (!is_nbr) continue;
        int64_t mu = unit_of_vertex(m);
        if (mu >= 0) take(mu);
      }
    }

    // Commit: expand units, move vertices, account decided cost.
    std::vector<VertexId> members;
    for (int64_t u : cluster_units) {
      if (u != pu) {
        remaining[static_cast<size_t>(u)] = 0;
        sampler.remove(u);
      }
      if (view.is_core(u)) {
        for (VertexId cm : core_members(view.core_cluster[static_cast<size_t>(u - view.n)]))
          members.push_back(cm);
      } else {
        members.push_back(static_cast<VertexId>(u));
      }
    }
    std::sort(members.begin(), members.end());
    ClusterId target = work.make_cluster();
    in_cluster.clear();
    for (VertexId v : members) in_cluster.mark(v);
    int64_t inside2 = 0, to_decided = 0;
    for (VertexId v : members) {
      rep.for_neighbors(v, scratch, [&](VertexId w) {
        if (in_cluster.contains(w)) ++inside2;
        else if (decided.contains(w)) ++to_decided;
      });
    }
    int64_t sz = static_cast<int64_t>(members.size());
    decided_cost += (sz * (sz - 1) / 2 - inside2 / 2) + to_decided;
    for (VertexId v : members) {
      decided.mark(v);
      work.move(v, target);
    }
    if (decided_cost > d) return rep.clustering;  // early abort: keep the input
  }
  return work;
}

}  // namespace ccdyn

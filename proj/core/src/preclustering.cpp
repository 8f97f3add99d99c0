#include "ccdyn/preclustering.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <stdexcept>

namespace ccdyn {

bool is_agreeing(const std::vector<VertexId>& cluster, const Graph& g, double beta) {
  if (cluster.empty()) throw std::invalid_argument("is_agreeing: empty cluster");
  StampSet in_c(static_cast<size_t>(g.n()));
  for (VertexId v : cluster) in_c.mark(v);
  const double bound = beta * static_cast<double>(cluster.size());
  for (VertexId v : cluster) {
    int64_t inside = 1;  // v itself (closed neighborhood)
    int64_t outside = 0;
    for (VertexId w : g.neighbors(v)) {
      if (in_c.contains(w))
        ++inside;
      else
        ++outside;
    }
    int64_t sym = outside + (static_cast<int64_t>(cluster.size()) - inside);
    if (!(static_cast<double>(sym) < bound)) return false;
  }
  return true;
}

CleanResult clean(const ClusterRepresentation& rep) {
  StepCounter sc;
  const Clustering& c = rep.clustering;
  const int32_t n = rep.n();

  StampSet active(static_cast<size_t>(n));
  StampMap<int32_t> pv(static_cast<size_t>(n));
  std::vector<VertexId> actives;
  std::vector<ClusterId> touched;
  StampSet touched_mark(static_cast<size_t>(c.cluster_ids()) + 1);

  rep.violation.for_each([&](VertexId u, VertexId v) {
    sc.add();
    for (VertexId x : {u, v}) {
      if (!active.contains(x)) {
        active.mark(x);
        actives.push_back(x);
        pv.set(x, 0);
        ClusterId cl = c.label(x);
        if (!touched_mark.contains(cl)) {
          touched_mark.mark(cl);
          touched.push_back(cl);
        }
      }
      ++pv.ref(x);
    }
  });

  // Marked vertices leave their cluster; clusters with too many marks shatter.
  StampSet marked(static_cast<size_t>(n));
  StampMap<int32_t> mark_count(static_cast<size_t>(c.cluster_ids()) + 1);
  for (VertexId v : actives) {
    sc.add();
    if (static_cast<double>(pv.get(v)) >= kCleanA * static_cast<double>(c.size(c.label(v)))) {
      marked.mark(v);
      ++mark_count.ref(c.label(v));
    }
  }
  StampSet shattered(static_cast<size_t>(c.cluster_ids()) + 1);
  for (ClusterId cl : touched) {
    sc.add();
    if (static_cast<double>(mark_count.get(cl)) >= kCleanB * static_cast<double>(c.size(cl)))
      shattered.mark(static_cast<VertexId>(cl));
  }

  // New clustering: copy, then split off marked vertices / shatter clusters.
  CleanResult out;
  out.rep.clustering = c;
  Clustering& work = out.rep.clustering;
  StampSet new_singleton(static_cast<size_t>(n));
  std::vector<VertexId> new_singletons;
  auto make_singleton = [&](VertexId v) {
    sc.add();
    work.move(v, work.make_cluster());
    new_singleton.mark(v);
    new_singletons.push_back(v);
  };
  for (ClusterId cl : touched) {
    if (shattered.contains(static_cast<VertexId>(cl))) {
      for (VertexId v : c.members(cl)) make_singleton(v);
    } else {
      for (VertexId v : c.members(cl))
        if (marked.contains(v)) make_singleton(v);
    }
  }

  // Violations that survive: missing pairs still inside a cluster, edges
  // crossing two non-singleton clusters.
  out.rep.violation = ViolationSet(n);
  rep.violation.for_each([&](VertexId u, VertexId v) {
    sc.add();
    bool was_same = c.same(u, v);
    if (was_same) {
      if (work.same(u, v)) out.rep.violation.add(u, v);  // still-missing pair
    } else {
      if (work.size(work.label(u)) > 1 && work.size(work.label(v)) > 1) out.rep.violation.add(u, v);
    }
  });
  // Every edge incident to a fresh singleton is violated now. Neighborhoods
  // are derived from the old representation.
  StampSet scratch(static_cast<size_t>(n));
  for (VertexId u : new_singletons) {
    rep.for_neighbors(u, scratch, [&](VertexId w) {
      sc.add();
      if (new_singleton.contains(w) && w < u) return;  // counted from the smaller id
      out.rep.violation.add(u, w);
    });
  }

  out.rep.degree = rep.degree;  // the encoded graph is unchanged
  out.steps = static_cast<int64_t>(sc.steps);
  return out;
}

Preclustering::Preclustering(const ClusterRepresentation* atoms_rep, AdmParams params)
    : rep_(atoms_rep), params_(params) {
  if (!(params_.epsilon > 0 && params_.epsilon < 0.1))
    throw std::invalid_argument("epsilon must lie in (0, 0.1)");
  if (params_.t_floor < 1) throw std::invalid_argument("t must be >= 1");
  const Clustering& c = rep_->clustering;
  const int32_t n = rep_->n();
  atom_adm_.resize(static_cast<size_t>(c.cluster_ids()));
  atoms_of_.resize(static_cast<size_t>(n));
  memo_.resize(static_cast<size_t>(n));
  scratch_a_.reset(static_cast<size_t>(n));
  scratch_b_.reset(static_cast<size_t>(n));
  scratch_c_.reset(static_cast<size_t>(n));

  // Deterministic atom lists from one scan of D: count edges into each atom,
  // then keep neighbors with >= |K|/3 overlap that are singletons and
  // degree-similar to the whole atom.
  StampSet touched(static_cast<size_t>(c.cluster_ids()));
  std::vector<ClusterId> touched_atoms;
  rep_->violation.for_each([&](VertexId u, VertexId v) {
    if (c.same(u, v)) return;
    for (VertexId x : {u, v}) {
      ClusterId cl = c.label(x);
      if (c.size(cl) > 1 && !touched.contains(cl)) {
        touched.mark(cl);
        touched_atoms.push_back(cl);
      }
    }
  });
  StampMap<int32_t> overlap(static_cast<size_t>(n));
  for (ClusterId atom : touched_atoms) {
    int32_t k = c.size(atom);
    // Degrees inside a strong atom are tightly banded; inactive members all
    // have degree |K| - 1, so min/max reduce to the active members.
    int32_t dmin = k - 1, dmax = k - 1;
    overlap.clear();
    std::vector<VertexId> outside;
    c.for_members(atom, [&](VertexId w) {
      if (rep_->violation.incident_count(w) == 0) return;
      dmin = std::min(dmin, rep_->deg(w));
      dmax = std::max(dmax, rep_->deg(w));
      for (int64_t idx : rep_->violation.incident(w)) {
        VertexId x = rep_->violation.other(idx, w);
        if (c.label(x) == atom) continue;  // in-atom violation: missing pair
        if (!overlap.contains(x)) outside.push_back(x);
        ++overlap.ref(x);
      }
    });
    auto& lst = atom_adm_[static_cast<size_t>(atom)];
    for (VertexId x : outside) {
      if (c.size(c.label(x)) > 1) continue;  // atom-atom pairs are never admissible
      if (3 * overlap.get(x) < k) continue;
      double dx = rep_->deg(x);
      if (!(params_.epsilon * dx < dmin && params_.epsilon * dmax < dx)) continue;
      lst.push_back(x);
    }
    std::sort(lst.begin(), lst.end());
    for (VertexId x : lst) atoms_of_[static_cast<size_t>(x)].push_back(atom);
  }
}

std::vector<VertexId> Preclustering::base_cluster(VertexId v) const {
  ClusterId c = rep_->clustering.label(v);
  if (rep_->clustering.size(c) > 1) {
    auto mem = rep_->clustering.members(c);
    std::sort(mem.begin(), mem.end());
    return mem;
  }
  return {v};
}

const std::vector<VertexId>& Preclustering::atom_admissible(ClusterId atom) const {
  if (atom < 0 || static_cast<size_t>(atom) >= atom_adm_.size()) return empty_list_v_;
  return atom_adm_[static_cast<size_t>(atom)];
}

const std::vector<ClusterId>& Preclustering::admissible_atoms_of(VertexId v) const {
  return atoms_of_[static_cast<size_t>(v)];
}

int32_t Preclustering::t_for(VertexId v) const {
  double d = std::max(1, rep_->deg(v));
  return std::max(params_.t_floor, static_cast<int32_t>(std::ceil(2.0 * std::log(d))));
}

bool Preclustering::memo_lookup(VertexId u, VertexId v, bool& verdict) const {
  Pair p(u, v);
  for (const auto& [w, ver] : memo_[static_cast<size_t>(p.a)]) {
    if (w == p.b) {
      verdict = ver;
      return true;
    }
  }
  return false;
}

void Preclustering::memo_store(VertexId u, VertexId v, bool verdict) {
  Pair p(u, v);
  memo_[static_cast<size_t>(p.a)].emplace_back(p.b, verdict);
  ++memo_count_;
}

bool Preclustering::exact_pair_singletons(VertexId u, VertexId v) const {
  if (!degree_similar(u, v)) return false;
  // Stamp closed N(v); count similar common neighbors over closed N(u).
  scratch_a_.clear();
  scratch_b_.clear();
  rep_->for_neighbors(v, scratch_c_, [&](VertexId w) { scratch_a_.mark(w); });
  scratch_a_.mark(v);
  int64_t common = 0;
  auto consider = [&](VertexId w) {
    if (!scratch_a_.contains(w)) return;
    if (degree_similar(w, u) && degree_similar(w, v)) ++common;
  };
  rep_->for_neighbors(u, scratch_c_, consider);
  consider(u);
  double need = params_.epsilon * static_cast<double>(rep_->deg(u) + rep_->deg(v));
  return static_cast<double>(common) >= need;
}

bool Preclustering::sampled_pair_singletons(VertexId u, VertexId v, RngStream& rng) const {
  if (rep_->deg(u) < rep_->deg(v)) std::swap(u, v);
  int32_t t = std::min(t_for(u), t_for(v));
  int64_t samples = static_cast<int64_t>(
      std::ceil(static_cast<double>(t) / (params_.epsilon * params_.epsilon)));
  // Closed neighborhood of the higher-degree endpoint. A singleton's edges
  // are exactly its cross violations.
  const auto& inc = rep_->violation.incident(u);
  int64_t nu = static_cast<int64_t>(inc.size()) + 1;
  scratch_a_.clear();
  for (int64_t idx : rep_->violation.incident(v)) scratch_a_.mark(rep_->violation.other(idx, v));
  scratch_a_.mark(v);
  int64_t hits = 0;
  for (int64_t i = 0; i < samples; ++i) {
    int64_t pick = rng.uniform_int(nu);
    VertexId x = pick == nu - 1 ? u : rep_->violation.other(inc[static_cast<size_t>(pick)], u);
    if (scratch_a_.contains(x) && degree_similar(x, u) && degree_similar(x, v)) ++hits;
  }
  double est = static_cast<double>(nu) * static_cast<double>(hits) / static_cast<double>(samples);
  return est > params_.epsilon / 2.0 * static_cast<double>(rep_->deg(u) + rep_->deg(v));
}

bool Preclustering::check_admissible(VertexId u, VertexId v, RngStream& rng) {
  if (u == v) return false;
  const Clustering& c = rep_->clustering;
  if (c.same(u, v)) return false;  // atomic, not admissible
  bool u_atom = in_atom(u), v_atom = in_atom(v);
  if (u_atom && v_atom) return false;
  if (u_atom || v_atom) {
    // Deterministic atom case.
    ClusterId atom = u_atom ? atom_of(u) : atom_of(v);
    VertexId single = u_atom ? v : u;
    const auto& lst = atom_admissible(atom);
    return std::binary_search(lst.begin(), lst.end(), single);
  }
  if (!degree_similar(u, v)) return false;
  bool verdict;
  if (memo_lookup(u, v, verdict)) return verdict;
  verdict = params_.exact ? exact_pair_singletons(u, v) : sampled_pair_singletons(u, v, rng);
  memo_store(u, v, verdict);
  return verdict;
}

std::vector<VertexId> Preclustering::list_admissible(VertexId v, RngStream& rng) {
  std::vector<VertexId> out;
  StampSet listed(static_cast<size_t>(rep_->n()));
  for (ClusterId atom : admissible_atoms_of(v)) {
    rep_->clustering.for_members(atom, [&](VertexId w) {
      if (!listed.contains(w)) {
        listed.mark(w);
        out.push_back(w);
      }
    });
  }
  // Similar neighbors of v; all of v's edges are cross violations.
  std::vector<VertexId> similar;
  for (int64_t idx : rep_->violation.incident(v)) {
    VertexId x = rep_->violation.other(idx, v);
    if (degree_similar(x, v)) similar.push_back(x);
  }
  if (!similar.empty()) {
    int32_t t = t_for(v);
    int64_t rounds = static_cast<int64_t>(std::ceil(static_cast<double>(t) / params_.epsilon));
    StampSet checked(static_cast<size_t>(rep_->n()));
    StampSet nbr_scratch(static_cast<size_t>(rep_->n()));
    for (int64_t i = 0; i < rounds; ++i) {
      VertexId x = similar[static_cast<size_t>(rng.uniform_int(static_cast<int64_t>(similar.size())))];
      rep_->for_neighbors(x, nbr_scratch, [&](VertexId w) {
        if (w == v || checked.contains(w) || in_atom(w)) return;
        checked.mark(w);
        if (check_admissible(v, w, rng) && !listed.contains(w)) {
          listed.mark(w);
          out.push_back(w);
        }
      });
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

bool Preclustering::exact_admissible(VertexId u, VertexId v) const {
  if (u == v) return false;
  const Clustering& c = rep_->clustering;
  if (c.same(u, v)) return false;
  bool u_atom = in_atom(u), v_atom = in_atom(v);
  if (u_atom && v_atom) return false;
  if (u_atom || v_atom) {
    ClusterId atom = u_atom ? atom_of(u) : atom_of(v);
    VertexId single = u_atom ? v : u;
    const auto& lst = atom_admissible(atom);
    return std::binary_search(lst.begin(), lst.end(), single);
  }
  return exact_pair_singletons(u, v);
}

std::vector<VertexId> Preclustering::candidate_neighbors_exact(VertexId p) const {
  std::vector<VertexId> out;
  StampSet seen(static_cast<size_t>(rep_->n()));
  StampSet nbr_scratch(static_cast<size_t>(rep_->n()));
  if (in_atom(p)) {
    for (VertexId w : atom_admissible(atom_of(p))) out.push_back(w);
    return out;
  }
  // Every admissible partner of a singleton shares a similar common
  // neighbor, so scanning the two-hop similar neighborhood is exhaustive.
  std::vector<VertexId> hop1;
  rep_->for_neighbors(p, nbr_scratch, [&](VertexId x) {
    if (degree_similar(x, p)) hop1.push_back(x);
  });
  for (VertexId x : hop1) {
    std::vector<VertexId> hop2;
    rep_->for_neighbors(x, nbr_scratch, [&](VertexId w) { hop2.push_back(w); });
    for (VertexId w : hop2) {
      if (w == p || seen.contains(w) || in_atom(w)) continue;
      seen.mark(w);
      if (exact_pair_singletons(p, w)) out.push_back(w);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<VertexId> Preclustering::candidate_neighbors(VertexId p, RngStream& rng) {
  if (params_.exact) return candidate_neighbors_exact(p);
  if (in_atom(p)) return atom_admissible(atom_of(p));
  std::vector<VertexId> listed = list_admissible(p, rng);
  std::vector<VertexId> out;
  for (VertexId w : listed)
    if (!in_atom(w)) out.push_back(w);
  return out;
}

Preclustering build_preclustering(const ClusterRepresentation& atoms_rep, AdmParams params) {
  return Preclustering(&atoms_rep, params);
}

PreclusteringProperties verify_preclustering_properties(const Preclustering& pre) {
  PreclusteringProperties props;
  const ClusterRepresentation& rep = pre.rep();
  const Clustering& c = rep.clustering;
  const int32_t n = rep.n();
  const double eps = pre.epsilon();
  std::vector<int64_t> d_adm(static_cast<size_t>(n), 0);

  for (VertexId u = 0; u < n; ++u) {
    for (VertexId v = u + 1; v < n; ++v) {
      if (!pre.exact_admissible(u, v)) continue;
      ++props.admissible_pairs;
      ++d_adm[static_cast<size_t>(u)];
      ++d_adm[static_cast<size_t>(v)];
      if (pre.in_atom(u) && pre.in_atom(v)) props.singleton_endpoint = false;
      if (!pre.degree_similar(u, v)) props.degree_similarity = false;
    }
  }
  for (VertexId v = 0; v < n; ++v) {
    double cap = (1.0 / (eps * eps) + 3.0) * static_cast<double>(rep.deg(v));
    if (static_cast<double>(d_adm[static_cast<size_t>(v)]) > cap) props.degree_bound = false;
  }
  std::vector<char> seen(static_cast<size_t>(c.cluster_ids()), 0);
  for (VertexId v = 0; v < n; ++v) {
    ClusterId cl = c.label(v);
    if (seen[static_cast<size_t>(cl)] || c.size(cl) <= 1) continue;
    seen[static_cast<size_t>(cl)] = 1;
    int64_t k_adm = static_cast<int64_t>(pre.atom_admissible(cl).size());
    int64_t d_d = 0;
    c.for_members(cl, [&](VertexId w) { d_d += rep.violation.incident_count(w); });
    if (static_cast<double>(k_adm) > 3.0 * static_cast<double>(d_d) / static_cast<double>(c.size(cl)))
      props.atom_degree_bound = false;
  }
  double cost_cap = (2.0 / (eps * eps) + 6.0) * static_cast<double>(rep.violation.size());
  if (!(static_cast<double>(props.admissible_pairs) < cost_cap || props.admissible_pairs == 0))
    props.total_bound = false;
  return props;
}

void write_preclustering(const ClusterRepresentation& atoms_rep, std::ostream& out) {
  write_representation(atoms_rep, out);
  auto labels = atoms_rep.clustering.dense_labels();
  ClusterId k = 0;
  for (ClusterId c : labels) k = std::max(k, static_cast<ClusterId>(c + 1));
  std::vector<int32_t> size(static_cast<size_t>(k), 0);
  for (ClusterId c : labels) ++size[static_cast<size_t>(c)];
  for (ClusterId c = 0; c < k; ++c) out << (size[static_cast<size_t>(c)] > 1 ? 1 : 0) << (c + 1 == k ? '\n' : ' ');
}

ClusterRepresentation read_preclustering(std::istream& in) {
  ClusterRepresentation rep = read_representation(in);
  auto labels = rep.clustering.dense_labels();
  ClusterId k = 0;
  for (ClusterId c : labels) k = std::max(k, static_cast<ClusterId>(c + 1));
  for (ClusterId c = 0; c < k; ++c) {
    int flag;
    if (!(in >> flag)) throw std::runtime_error("preclustering: missing atom flags");
    bool is_atom = false;
    for (VertexId v = 0; v < rep.n() && !is_atom; ++v)
      if (labels[static_cast<size_t>(v)] == c && rep.clustering.size(rep.clustering.label(v)) > 1)
        is_atom = true;
    if (is_atom != (flag != 0)) throw std::runtime_error("preclustering: atom flag mismatch");
  }
  return rep;
}

}  // namespace ccdyn

#include "ccdyn/reconcile.hpp"

#include <algorithm>
#include <stdexcept>

namespace ccdyn {

int64_t apply_flips(ClusterRepresentation& rep, UpdateBuffer& buf) {
  StepCounter steps;
  if (buf.empty()) return 0;
  const int32_t n = rep.n();
  StampSet parity_mark(static_cast<size_t>(n));
  StampMap<int32_t> parity(static_cast<size_t>(n));
  StampMap<int64_t> in_d(static_cast<size_t>(n));

  for (VertexId lo : buf.touched()) {
    // Net parity of each flipped partner of lo.
    parity_mark.clear();
    parity.clear();
    std::vector<VertexId> partners;
    for (VertexId hi : buf.partners(lo)) {
      steps.add();
      if (!parity_mark.contains(hi)) {
        parity_mark.mark(hi);
        parity.set(hi, 1);
        partners.push_back(hi);
      } else {
        parity.ref(hi) ^= 1;
      }
    }
    // Stamp lo's current D partners so each toggle is O(1).
    in_d.clear();
    for (int64_t idx : rep.violation.incident(lo)) {
      steps.add();
      in_d.set(rep.violation.other(idx, lo), idx);
    }
    for (VertexId hi : partners) {
      if (parity.get(hi) == 0) continue;
      steps.add();
      bool same = rep.clustering.same(lo, hi);
      bool was_in_d = in_d.contains(hi);
      // Edge present before the toggle: same-cluster XOR violated.
      bool present_before = same != was_in_d;
      int dd = present_before ? -1 : 1;
      rep.degree[static_cast<size_t>(lo)] += dd;
      rep.degree[static_cast<size_t>(hi)] += dd;
      if (was_in_d) {
        int64_t idx = in_d.get(hi);
        int64_t last = rep.violation.size() - 1;
        rep.violation.remove_at(idx);
        // The entry that swapped into idx may itself be stamped; repoint it.
        if (idx != last) {
          VertexId a = rep.violation.pair(idx).a, b = rep.violation.pair(idx).b;
          if (a == lo && in_d.contains(b) && in_d.get(b) == last) in_d.set(b, idx);
          if (b == lo && in_d.contains(a) && in_d.get(a) == last) in_d.set(a, idx);
        }
      } else {
        in_d.set(hi, rep.violation.size());
        rep.violation.add(lo, hi);
      }
    }
  }
  buf.clear();
  return static_cast<int64_t>(steps.steps);
}

namespace {

// Shared implementation; `budget` < 0 disables the cutoff and the |D'| guard.
std::optional<SymDiffResult> sym_diff_impl(const ClusterRepresentation& rep,
                                           const Clustering& new_clustering,
                                           const std::vector<VertexId>& move_log, int64_t budget) {
  const int64_t d_in = rep.violation.size();
  const bool bounded = budget >= 0;
  StepCounter steps;
  const Clustering& oldc = rep.clustering;
  const Clustering& newc = new_clustering;

  ViolationSet out(rep.n());
  // Pairs of D whose same-cluster status is unchanged stay violated.
  bool aborted = false;
  rep.violation.for_each([&](VertexId u, VertexId v) {
    if (aborted) return;
    steps.add();
    if (oldc.same(u, v) == newc.same(u, v)) out.add(u, v);
    if (bounded && static_cast<int64_t>(steps.steps) > budget) aborted = true;
  });
  if (aborted) return std::nullopt;

  StampSet processed(static_cast<size_t>(rep.n()));
  StampSet in_new(static_cast<size_t>(rep.n()));
  StampSet in_old(static_cast<size_t>(rep.n()));
  StampSet d_partner(static_cast<size_t>(rep.n()));

  for (VertexId v : move_log) {
    if (processed.contains(v)) continue;
    steps.add();
    ClusterId co = oldc.label(v), cn = newc.label(v);
    in_new.clear();
    in_old.clear();
    newc.for_members(cn, [&](VertexId w) { in_new.mark(w); });
    oldc.for_members(co, [&](VertexId w) { in_old.mark(w); });
    // X = old-cluster xor new-cluster, Y = intersection (contains v).
    std::vector<VertexId> xs, ys;
    oldc.for_members(co, [&](VertexId w) {
      steps.add();
      (in_new.contains(w) ? ys : xs).push_back(w);
    });
    newc.for_members(cn, [&](VertexId w) {
      steps.add();
      if (!in_old.contains(w)) xs.push_back(w);
    });
    for (VertexId y : ys) {
      processed.mark(y);
      d_partner.clear();
      for (int64_t idx : rep.violation.incident(y)) {
        steps.add();
        d_partner.mark(rep.violation.other(idx, y));
      }
      // A changed pair can be enumerated from both endpoints' move groups;
      // stamp what this scan already inserted so the second visit skips it.
      for (int64_t idx : out.incident(y)) {
        steps.add();
        d_partner.mark(out.other(idx, y));
      }
      for (VertexId x : xs) {
        steps.add();
        // Status of (x, y) changed; it becomes violated exactly when it was
        // not violated before.
        if (!d_partner.contains(x)) out.add(x, y);
        if (bounded && (out.size() > d_in || static_cast<int64_t>(steps.steps) > budget)) {
          aborted = true;
          break;
        }
      }
      if (aborted) break;
    }
    if (aborted) break;
    if (bounded && static_cast<int64_t>(steps.steps) > budget) aborted = true;
  }
  if (aborted) return std::nullopt;
  if (bounded && out.size() > d_in) return std::nullopt;

  SymDiffResult res;
  res.rep.clustering = newc;
  res.rep.violation = std::move(out);
  res.rep.degree = rep.degree;  // the graph itself is unchanged
  res.steps = static_cast<int64_t>(steps.steps);
  return res;
}

}  // namespace

std::optional<SymDiffResult> symmetric_difference_update(const ClusterRepresentation& rep,
                                                         const Clustering& new_clustering,
                                                         const std::vector<VertexId>& move_log) {
  int64_t budget = kSymDiffBudgetFactor * (rep.violation.size() + 1);
  return sym_diff_impl(rep, new_clustering, move_log, budget);
}

SymDiffResult symmetric_difference_full(const ClusterRepresentation& rep,
                                        const Clustering& new_clustering,
                                        const std::vector<VertexId>& move_log) {
  auto res = sym_diff_impl(rep, new_clustering, move_log, -1);
  return std::move(*res);
}

const ClusterRepresentation& best_of(const ClusterRepresentation& a, const ClusterRepresentation& b,
                                     TieRule tie) {
#ifndef NDEBUG
  if (a.n() != b.n()) throw std::logic_error("best_of: different vertex sets");
  if (a.n() <= 256) {
    if (!(a.reconstruct_graph().canonical_key() == b.reconstruct_graph().canonical_key()))
      throw std::logic_error("best_of: representations encode different graphs");
  }
#endif
  if (a.violation.size() == b.violation.size()) return tie == TieRule::KeepFirst ? a : b;
  return a.violation.size() < b.violation.size() ? a : b;
}

}  // namespace ccdyn

#include "ccdyn/representation.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <stdexcept>

namespace ccdyn {

void ViolationSet::add(VertexId u, VertexId v) {
  if (u == v) throw std::invalid_argument("violation pair with equal endpoints");
  Pair p(u, v);
  Entry e{p.a, p.b, static_cast<int32_t>(incident_[static_cast<size_t>(p.a)].size()),
          static_cast<int32_t>(incident_[static_cast<size_t>(p.b)].size())};
  int64_t idx = static_cast<int64_t>(entries_.size());
  entries_.push_back(e);
  incident_[static_cast<size_t>(p.a)].push_back(idx);
  incident_[static_cast<size_t>(p.b)].push_back(idx);
}

void ViolationSet::remove_at(int64_t idx) {
  Entry e = entries_[static_cast<size_t>(idx)];
  // Detach from both incidence lists, patching the entry that gets swapped in.
  for (VertexId x : {e.u, e.v}) {
    auto& lst = incident_[static_cast<size_t>(x)];
    int32_t pos = pos_of(e, x);
    int64_t moved = lst.back();
    lst[static_cast<size_t>(pos)] = moved;
    lst.pop_back();
    if (moved != idx) pos_of(entries_[static_cast<size_t>(moved)], x) = pos;
  }
  // Swap-remove the entry itself; repoint the moved entry's incidence slots.
  int64_t last = static_cast<int64_t>(entries_.size()) - 1;
  if (idx != last) {
    Entry& m = entries_[static_cast<size_t>(last)];
    incident_[static_cast<size_t>(m.u)][static_cast<size_t>(m.pos_u)] = idx;
    incident_[static_cast<size_t>(m.v)][static_cast<size_t>(m.pos_v)] = idx;
    entries_[static_cast<size_t>(idx)] = m;
  }
  entries_.pop_back();
}

int64_t ViolationSet::find(VertexId u, VertexId v) const {
  const auto& lu = incident_[static_cast<size_t>(u)];
  const auto& lv = incident_[static_cast<size_t>(v)];
  const auto& shorter = lu.size() <= lv.size() ? lu : lv;
  VertexId self = lu.size() <= lv.size() ? u : v;
  VertexId target = lu.size() <= lv.size() ? v : u;
  for (int64_t idx : shorter)
    if (other(idx, self) == target) return idx;
  return -1;
}

std::vector<Pair> ViolationSet::pairs() const {
  std::vector<Pair> out;
  out.reserve(entries_.size());
  for (const Entry& e : entries_) out.emplace_back(e.u, e.v);
  return out;
}

int64_t clustering_cost(const Graph& g, const Clustering& c) {
  if (g.n() != c.n()) throw std::invalid_argument("clustering does not label this graph");
  int64_t cut = 0;
  for (VertexId u = 0; u < g.n(); ++u)
    for (VertexId v : g.neighbors(u))
      if (u < v && !c.same(u, v)) ++cut;
  int64_t missing = 0;
  std::vector<char> seen(static_cast<size_t>(c.cluster_ids()), 0);
  for (VertexId v = 0; v < g.n(); ++v) {
    ClusterId cl = c.label(v);
    if (seen[static_cast<size_t>(cl)]) continue;
    seen[static_cast<size_t>(cl)] = 1;
    int64_t s = c.size(cl);
    int64_t inside = 0;
    c.for_members(cl, [&](VertexId x) {
      for (VertexId w : g.neighbors(x))
        if (c.label(w) == cl && x < w) ++inside;
    });
    missing += s * (s - 1) / 2 - inside;
  }
  return cut + missing;
}

std::vector<Pair> violation(const Graph& g, const Clustering& c) {
  if (g.n() != c.n()) throw std::invalid_argument("clustering does not label this graph");
  std::vector<Pair> out;
  for (VertexId u = 0; u < g.n(); ++u)
    for (VertexId v : g.neighbors(u))
      if (u < v && !c.same(u, v)) out.emplace_back(u, v);
  StampSet adj(static_cast<size_t>(g.n()));
  std::vector<char> seen(static_cast<size_t>(c.cluster_ids()), 0);
  for (VertexId v = 0; v < g.n(); ++v) {
    ClusterId cl = c.label(v);
    if (seen[static_cast<size_t>(cl)]) continue;
    seen[static_cast<size_t>(cl)] = 1;
    auto mem = c.members(cl);
    std::sort(mem.begin(), mem.end());
    for (VertexId x : mem) {
      adj.clear();
      for (VertexId w : g.neighbors(x)) adj.mark(w);
      for (VertexId y : mem)
        if (x < y && !adj.contains(y)) out.emplace_back(x, y);
    }
  }
  return out;
}

void ClusterRepresentation::recompute_degrees() {
  degree.assign(static_cast<size_t>(n()), 0);
  for (VertexId v = 0; v < n(); ++v)
    degree[static_cast<size_t>(v)] = clustering.size(clustering.label(v)) - 1;
  violation.for_each([&](VertexId u, VertexId v) {
    bool same = clustering.same(u, v);
    // In-cluster violations are missing pairs; cross violations are edges.
    int d = same ? -1 : 1;
    degree[static_cast<size_t>(u)] += d;
    degree[static_cast<size_t>(v)] += d;
  });
}

Graph ClusterRepresentation::reconstruct_graph() const {
  Graph g(n());
  StampSet scratch(static_cast<size_t>(n()));
  for (VertexId v = 0; v < n(); ++v)
    for_neighbors(v, scratch, [&](VertexId w) {
      if (v < w) g.add_edge(v, w);
    });
  return g;
}

ClusterRepresentation ClusterRepresentation::from(const Graph& g, Clustering c) {
  ClusterRepresentation rep;
  rep.violation = ViolationSet(g.n());
  for (const Pair& p : ccdyn::violation(g, c)) rep.violation.add(p.a, p.b);
  rep.clustering = std::move(c);
  rep.degree.assign(static_cast<size_t>(g.n()), 0);
  for (VertexId v = 0; v < g.n(); ++v) rep.degree[static_cast<size_t>(v)] = g.degree(v);
  return rep;
}

ClusterRepresentation ClusterRepresentation::singletons(const Graph& g) {
  return from(g, Clustering::singletons(g.n()));
}

void write_representation(const ClusterRepresentation& rep, std::ostream& out) {
  auto labels = rep.clustering.dense_labels();
  ClusterId k = 0;
  for (ClusterId c : labels) k = std::max(k, static_cast<ClusterId>(c + 1));
  out << rep.n() << ' ' << k << '\n';
  for (size_t v = 0; v < labels.size(); ++v) out << labels[v] << (v + 1 == labels.size() ? '\n' : ' ');
  auto pairs = rep.violation.pairs();
  std::sort(pairs.begin(), pairs.end());
  out << pairs.size() << '\n';
  for (const Pair& p : pairs) out << p.a << ' ' << p.b << '\n';
}

ClusterRepresentation read_representation(std::istream& in) {
  int64_t n, k;
  if (!(in >> n >> k)) throw std::runtime_error("representation: bad header");
  std::vector<ClusterId> labels(static_cast<size_t>(n));
  for (auto& l : labels)
    if (!(in >> l)) throw std::runtime_error("representation: truncated labels");
  int64_t d;
  if (!(in >> d)) throw std::runtime_error("representation: missing violation count");
  ClusterRepresentation rep;
  rep.clustering = Clustering::from_labels(labels);
  rep.violation = ViolationSet(static_cast<int32_t>(n));
  for (int64_t i = 0; i < d; ++i) {
    int64_t u, v;
    if (!(in >> u >> v)) throw std::runtime_error("representation: truncated pairs");
    rep.violation.add(static_cast<VertexId>(u), static_cast<VertexId>(v));
  }
  rep.recompute_degrees();
  return rep;
}

}  // namespace ccdyn

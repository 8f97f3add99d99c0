#include "ccdyn/clustering.hpp"

#include <algorithm>
#include <stdexcept>

namespace ccdyn {

void Clustering::init(int32_t n) {
  slot_[0].assign(static_cast<size_t>(n), kNoCluster);
  slot_[1].assign(static_cast<size_t>(n), kNoCluster);
  next_.assign(static_cast<size_t>(n), -1);
  prev_.assign(static_cast<size_t>(n), -1);
  live_ = 0;
  nonempty_ = 0;
}

Clustering Clustering::singletons(int32_t n) {
  Clustering c;
  c.init(n);
  c.head_.assign(static_cast<size_t>(n), -1);
  c.size_.assign(static_cast<size_t>(n), 0);
  for (VertexId v = 0; v < n; ++v) {
    c.slot_[0][static_cast<size_t>(v)] = v;
    c.list_insert(v, v);
  }
  return c;
}

Clustering Clustering::one_cluster(int32_t n) {
  Clustering c;
  c.init(n);
  if (n == 0) return c;
  c.head_.assign(1, -1);
  c.size_.assign(1, 0);
  for (VertexId v = n - 1; v >= 0; --v) {
    c.slot_[0][static_cast<size_t>(v)] = 0;
    c.list_insert(v, 0);
  }
  return c;
}

Clustering Clustering::from_labels(const std::vector<ClusterId>& labels) {
  Clustering c;
  c.init(static_cast<int32_t>(labels.size()));
  std::vector<ClusterId> remap;
  for (size_t v = 0; v < labels.size(); ++v) {
    ClusterId raw = labels[v];
    if (raw < 0) throw std::invalid_argument("negative cluster label");
    if (static_cast<size_t>(raw) >= remap.size()) remap.resize(static_cast<size_t>(raw) + 1, kNoCluster);
    if (remap[static_cast<size_t>(raw)] == kNoCluster) {
      remap[static_cast<size_t>(raw)] = static_cast<ClusterId>(c.head_.size());
      c.head_.push_back(-1);
      c.size_.push_back(0);
    }
    ClusterId id = remap[static_cast<size_t>(raw)];
    c.slot_[0][v] = id;
    c.list_insert(static_cast<VertexId>(v), id);
  }
  return c;
}

std::vector<VertexId> Clustering::members(ClusterId c) const {
  std::vector<VertexId> out;
  out.reserve(static_cast<size_t>(size(c)));
  for_members(c, [&](VertexId v) { out.push_back(v); });
  return out;
}

ClusterId Clustering::make_cluster() {
  head_.push_back(-1);
  size_.push_back(0);
  return static_cast<ClusterId>(head_.size() - 1);
}

void Clustering::ensure_cluster(ClusterId c) {
  while (static_cast<size_t>(c) >= head_.size()) make_cluster();
}

void Clustering::list_insert(VertexId v, ClusterId c) {
  VertexId h = head_[static_cast<size_t>(c)];
  next_[static_cast<size_t>(v)] = h;
  prev_[static_cast<size_t>(v)] = -1;
  if (h != -1) prev_[static_cast<size_t>(h)] = v;
  head_[static_cast<size_t>(c)] = v;
  if (size_[static_cast<size_t>(c)]++ == 0) ++nonempty_;
}

void Clustering::list_remove(VertexId v) {
  ClusterId c = label(v);
  VertexId p = prev_[static_cast<size_t>(v)], nx = next_[static_cast<size_t>(v)];
  if (p != -1)
    next_[static_cast<size_t>(p)] = nx;
  else
    head_[static_cast<size_t>(c)] = nx;
  if (nx != -1) prev_[static_cast<size_t>(nx)] = p;
  if (--size_[static_cast<size_t>(c)] == 0) --nonempty_;
}

void Clustering::move(VertexId v, ClusterId c) {
  if (c < 0 || static_cast<size_t>(c) >= head_.size()) throw std::out_of_range("bad cluster id");
  if (label(v) == c) return;
  list_remove(v);
  slot_[live_][static_cast<size_t>(v)] = c;
  slot_[1 - live_][static_cast<size_t>(v)] = kNoCluster;
  list_insert(v, c);
}

void Clustering::stage_move(VertexId v, ClusterId c) {
  ensure_cluster(c);
  if (live_ != 0) throw std::logic_error("stage_move inside an open swap window");
  if (slot_[1][static_cast<size_t>(v)] != kNoCluster)
    throw std::logic_error("stage_move on a vertex with an uncleaned staged slot");
  list_remove(v);
  // Resolved label stays the canonical slot until flip_slots(); the member
  // lists are repositioned now so they match the post-flip assignment.
  slot_[1][static_cast<size_t>(v)] = c;
  list_insert(v, c);
}

void Clustering::flip_slots() { live_ = 1; }

void Clustering::clean_stale(VertexId v) {
  ClusterId staged = slot_[1][static_cast<size_t>(v)];
  if (staged == kNoCluster) return;
  // Canonical first, then clear: v resolves to the staged label throughout.
  slot_[0][static_cast<size_t>(v)] = staged;
  slot_[1][static_cast<size_t>(v)] = kNoCluster;
}

void Clustering::finish_swap() { live_ = 0; }

std::vector<ClusterId> Clustering::dense_labels() const {
  std::vector<ClusterId> remap(head_.size(), kNoCluster);
  std::vector<ClusterId> out(static_cast<size_t>(n()), kNoCluster);
  ClusterId k = 0;
  for (VertexId v = 0; v < n(); ++v) {
    ClusterId c = label(v);
    if (remap[static_cast<size_t>(c)] == kNoCluster) remap[static_cast<size_t>(c)] = k++;
    out[static_cast<size_t>(v)] = remap[static_cast<size_t>(c)];
  }
  return out;
}

std::vector<int32_t> Clustering::canonical_signature() const { return dense_labels(); }

bool equivalent(const Clustering& a, const Clustering& b) {
  if (a.n() != b.n()) return false;
  return a.dense_labels() == b.dense_labels();
}

}  // namespace ccdyn

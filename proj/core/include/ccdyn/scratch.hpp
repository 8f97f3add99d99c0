#pragma once

#include <cstdint>
#include <vector>

#include "ccdyn/types.hpp"

namespace ccdyn {

// Epoch-stamped membership marks over [0, n). clear() is O(1); no hashing.
class StampSet {
 public:
  StampSet() = default;
  explicit StampSet(size_t n) : stamp_(n, 0) {}

  void reset(size_t n) {
    stamp_.assign(n, 0);
    epoch_ = 1;
  }

  void clear() {
    if (++epoch_ == 0) {
      std::fill(stamp_.begin(), stamp_.end(), 0);
      epoch_ = 1;
    }
  }

  void mark(VertexId v) { stamp_[static_cast<size_t>(v)] = epoch_; }
  void unmark(VertexId v) { stamp_[static_cast<size_t>(v)] = 0; }
  bool contains(VertexId v) const { return stamp_[static_cast<size_t>(v)] == epoch_; }
  size_t capacity() const { return stamp_.size(); }

 private:
  std::vector<uint32_t> stamp_;
  uint32_t epoch_ = 1;
};

// Epoch-stamped map from [0, n) to T; reads of unset keys return `fallback`.
template <class T>
class StampMap {
 public:
  StampMap() = default;
  explicit StampMap(size_t n) : stamp_(n, 0), value_(n) {}

  void reset(size_t n) {
    stamp_.assign(n, 0);
    value_.assign(n, T{});
    epoch_ = 1;
  }

  void clear() {
    if (++epoch_ == 0) {
      std::fill(stamp_.begin(), stamp_.end(), 0);
      epoch_ = 1;
    }
  }

  void set(VertexId v, const T& t) {
    stamp_[static_cast<size_t>(v)] = epoch_;
    value_[static_cast<size_t>(v)] = t;
  }

  bool contains(VertexId v) const { return stamp_[static_cast<size_t>(v)] == epoch_; }

  T get(VertexId v, const T& fallback = T{}) const {
    return contains(v) ? value_[static_cast<size_t>(v)] : fallback;
  }

  T& ref(VertexId v, const T& init = T{}) {
    if (!contains(v)) set(v, init);
    return value_[static_cast<size_t>(v)];
  }

 private:
  std::vector<uint32_t> stamp_;
  std::vector<T> value_;
  uint32_t epoch_ = 1;
};

// Basic-operation counter. Time-budget contracts are asserted against these
// counts, never against wall clock.
struct StepCounter {
  uint64_t steps = 0;
  void add(uint64_t k = 1) { steps += k; }
};

}  // namespace ccdyn

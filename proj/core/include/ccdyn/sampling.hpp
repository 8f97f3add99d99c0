#pragma once

#include <cstdint>
#include <vector>

#include "ccdyn/rng.hpp"
#include "ccdyn/types.hpp"

namespace ccdyn {

/// Weighted sampling without replacement over integer weights.
///
/// Items are grouped into power-of-two weight buckets. A draw first picks a
/// bucket proportionally to its exact remaining weight (a scan over at most
/// 64 levels), then rejection-samples inside the bucket, where acceptance is
/// at least 1/2. Totals are maintained exactly. Removed items are never
/// sampled again; late insertion of new items is supported.
class WeightedSampler {
 public:
  WeightedSampler() = default;
  /// One item per weight, ids 0..n-1. All weights must be positive.
  explicit WeightedSampler(const std::vector<uint64_t>& weights);

  /// Adds an item with the given id (ids may be sparse but must be unique).
  void insert(int64_t id, uint64_t weight);

  bool empty() const { return count_ == 0; }
  int64_t count() const { return count_; }
  uint64_t total_weight() const { return total_; }
  bool contains(int64_t id) const {
    return id >= 0 && static_cast<size_t>(id) < where_.size() && where_[static_cast<size_t>(id)].level >= 0;
  }
  uint64_t weight(int64_t id) const { return where_[static_cast<size_t>(id)].weight; }

  /// Samples an item with probability weight/total and removes it.
  /// Throws std::logic_error when empty.
  int64_t sample_remove(RngStream& rng);

  /// Removes an item. Absent ids are a logged no-op (returns false).
  bool remove(int64_t id);

 private:
  struct Slot {
    int32_t level = -1;
    int32_t pos = -1;
    uint64_t weight = 0;
  };

  static int32_t level_of(uint64_t w);
  void detach(int64_t id);

  std::vector<std::vector<int64_t>> bucket_ = std::vector<std::vector<int64_t>>(64);
  std::vector<uint64_t> bucket_weight_ = std::vector<uint64_t>(64, 0);
  std::vector<Slot> where_;
  uint64_t total_ = 0;
  int64_t count_ = 0;
  int32_t max_level_ = -1;
};

/// Same structure over positive real weights (used for probability vectors).
/// Bucketing is by binary exponent; totals are tracked in double precision.
class RealWeightedSampler {
 public:
  RealWeightedSampler() = default;
  explicit RealWeightedSampler(const std::vector<double>& weights);

  void insert(int64_t id, double weight);
  bool empty() const { return count_ == 0; }
  int64_t count() const { return count_; }
  double total_weight() const { return total_; }

  int64_t sample_remove(RngStream& rng);
  bool remove(int64_t id);

 private:
  struct Slot {
    int32_t level = kUnset;
    int32_t pos = -1;
    double weight = 0;
  };
  static constexpr int32_t kUnset = INT32_MIN;

  int32_t bucket_index(int32_t level) const { return level - kMinExp; }
  void detach(int64_t id);

  static constexpr int32_t kMinExp = -1100;
  static constexpr int32_t kMaxExp = 1100;

  std::vector<std::vector<int64_t>> bucket_ = std::vector<std::vector<int64_t>>(kMaxExp - kMinExp);
  std::vector<double> bucket_weight_ = std::vector<double>(kMaxExp - kMinExp, 0.0);
  std::vector<Slot> where_;
  double total_ = 0;
  int64_t count_ = 0;
  std::vector<int32_t> active_levels_;
};

}  // namespace ccdyn

#include "ccdyn/sampling.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>

namespace ccdyn {

int32_t WeightedSampler::level_of(uint64_t w) {
  return 63 - std::countl_zero(w);  // floor(log2 w); w in [2^l, 2^(l+1))
}

WeightedSampler::WeightedSampler(const std::vector<uint64_t>& weights) {
  where_.resize(weights.size());
  for (size_t i = 0; i < weights.size(); ++i) insert(static_cast<int64_t>(i), weights[i]);
}

void WeightedSampler::insert(int64_t id, uint64_t weight) {
  if (weight == 0) throw std::invalid_argument("weights must be positive");
  if (id < 0) throw std::invalid_argument("negative item id");
  if (static_cast<size_t>(id) >= where_.size()) where_.resize(static_cast<size_t>(id) + 1);
  if (where_[static_cast<size_t>(id)].level >= 0) throw std::invalid_argument("duplicate item id");
  int32_t lv = level_of(weight);
  auto& b = bucket_[static_cast<size_t>(lv)];
  where_[static_cast<size_t>(id)] = {lv, static_cast<int32_t>(b.size()), weight};
  b.push_back(id);
  bucket_weight_[static_cast<size_t>(lv)] += weight;
  total_ += weight;
  ++count_;
  if (lv > max_level_) max_level_ = lv;
}

void WeightedSampler::detach(int64_t id) {
  Slot& s = where_[static_cast<size_t>(id)];
  auto& b = bucket_[static_cast<size_t>(s.level)];
  int64_t moved = b.back();
  b[static_cast<size_t>(s.pos)] = moved;
  b.pop_back();
  if (moved != id) where_[static_cast<size_t>(moved)].pos = s.pos;
  bucket_weight_[static_cast<size_t>(s.level)] -= s.weight;
  total_ -= s.weight;
  --count_;
  s = Slot{};
}

int64_t WeightedSampler::sample_remove(RngStream& rng) {
  if (count_ == 0) throw std::logic_error("sample_remove on empty sampler");
  for (;;) {
    // Bucket choice proportional to its upper-bound mass count * 2^(lv+1);
    // the rejection inside the bucket corrects down to the exact weights.
    // Acceptance is at least 1/2 per attempt.
    __uint128_t total_bound = 0;
    for (int32_t lv = 0; lv <= max_level_; ++lv)
      total_bound += static_cast<__uint128_t>(bucket_[static_cast<size_t>(lv)].size()) << (lv + 1);
    __uint128_t r = (static_cast<__uint128_t>(rng.next_u64()) << 64 | rng.next_u64()) % total_bound;
    int32_t lv = 0;
    for (;; ++lv) {
      __uint128_t bound = static_cast<__uint128_t>(bucket_[static_cast<size_t>(lv)].size()) << (lv + 1);
      if (r < bound) break;
      r -= bound;
    }
    const auto& b = bucket_[static_cast<size_t>(lv)];
    int64_t id = b[static_cast<size_t>(rng.uniform_u64(b.size()))];
    uint64_t w = where_[static_cast<size_t>(id)].weight;
    bool accept = (lv >= 63) ? (rng.next_u64() < w)  // cap 2^64
                             : (rng.uniform_u64(uint64_t{1} << (lv + 1)) < w);
    if (accept) {
      detach(id);
      return id;
    }
  }
}

bool WeightedSampler::remove(int64_t id) {
  if (!contains(id)) return false;
  detach(id);
  return true;
}

RealWeightedSampler::RealWeightedSampler(const std::vector<double>& weights) {
  where_.resize(weights.size());
  for (size_t i = 0; i < weights.size(); ++i) insert(static_cast<int64_t>(i), weights[i]);
}

void RealWeightedSampler::insert(int64_t id, double weight) {
  if (!(weight > 0) || !std::isfinite(weight)) throw std::invalid_argument("weights must be positive");
  if (id < 0) throw std::invalid_argument("negative item id");
  if (static_cast<size_t>(id) >= where_.size()) where_.resize(static_cast<size_t>(id) + 1);
  if (where_[static_cast<size_t>(id)].level != kUnset) throw std::invalid_argument("duplicate item id");
  int exp = 0;
  std::frexp(weight, &exp);  // weight = m * 2^exp, m in [0.5, 1)
  int32_t bi = bucket_index(exp);
  auto& b = bucket_[static_cast<size_t>(bi)];
  where_[static_cast<size_t>(id)] = {exp, static_cast<int32_t>(b.size()), weight};
  if (b.empty()) active_levels_.push_back(exp);
  b.push_back(id);
  bucket_weight_[static_cast<size_t>(bi)] += weight;
  total_ += weight;
  ++count_;
}

void RealWeightedSampler::detach(int64_t id) {
  Slot& s = where_[static_cast<size_t>(id)];
  int32_t bi = bucket_index(s.level);
  auto& b = bucket_[static_cast<size_t>(bi)];
  int64_t moved = b.back();
  b[static_cast<size_t>(s.pos)] = moved;
  b.pop_back();
  if (moved != id) where_[static_cast<size_t>(moved)].pos = s.pos;
  bucket_weight_[static_cast<size_t>(bi)] -= s.weight;
  total_ -= s.weight;
  --count_;
  s = Slot{};
}

int64_t RealWeightedSampler::sample_remove(RngStream& rng) {
  if (count_ == 0) throw std::logic_error("sample_remove on empty sampler");
  for (;;) {
    // Bucket choice by upper-bound mass count * 2^lv, rejection inside.
    double total_bound = 0;
    for (size_t i = 0; i < active_levels_.size();) {
      int32_t lv = active_levels_[i];
      int32_t bi = bucket_index(lv);
      if (bucket_[static_cast<size_t>(bi)].empty()) {
        bucket_weight_[static_cast<size_t>(bi)] = 0;
        active_levels_[i] = active_levels_.back();
        active_levels_.pop_back();
        continue;
      }
      total_bound += static_cast<double>(bucket_[static_cast<size_t>(bi)].size()) * std::ldexp(1.0, lv);
      ++i;
    }
    double r = rng.next_double() * total_bound;
    int32_t chosen = kUnset;
    for (size_t i = 0; i < active_levels_.size(); ++i) {
      int32_t lv = active_levels_[i];
      int32_t bi = bucket_index(lv);
      double bound = static_cast<double>(bucket_[static_cast<size_t>(bi)].size()) * std::ldexp(1.0, lv);
      if (r < bound) {
        chosen = lv;
        break;
      }
      r -= bound;
    }
    if (chosen == kUnset) {
      // Floating-point tail; fall back to the last non-empty level.
      for (int32_t lv : active_levels_)
        if (!bucket_[static_cast<size_t>(bucket_index(lv))].empty()) chosen = lv;
      if (chosen == kUnset) throw std::logic_error("sampler bookkeeping corrupted");
    }
    const auto& b = bucket_[static_cast<size_t>(bucket_index(chosen))];
    int64_t id = b[static_cast<size_t>(rng.uniform_u64(b.size()))];
    double w = where_[static_cast<size_t>(id)].weight;
    double cap = std::ldexp(1.0, chosen);  // weights in [cap/2, cap)
    if (rng.next_double() * cap < w) {
      detach(id);
      return id;
    }
  }
}

bool RealWeightedSampler::remove(int64_t id) {
  if (id < 0 || static_cast<size_t>(id) >= where_.size() || where_[static_cast<size_t>(id)].level == kUnset)
    return false;
  detach(id);
  return true;
}

}  // namespace ccdyn

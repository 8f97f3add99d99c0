#pragma once

#include <array>
#include <cstdint>

namespace ccdyn {

// Self-contained xoshiro256++ generator so that draw sequences are identical
// across platforms and standard libraries. A (seed, streamId) pair fully
// determines the sequence; distinct streamIds give independent-in-practice
// streams of the same seed.
class RngStream {
 public:
  RngStream() : RngStream(0, 0) {}
  RngStream(uint64_t seed, uint64_t stream_id) {
    uint64_t x = seed ^ (stream_id * 0x9e3779b97f4a7c15ULL) ^ 0x8e2f3a1dc45b96d7ULL;
    for (auto& s : state_) s = splitmix64(x);
    if ((state_[0] | state_[1] | state_[2] | state_[3]) == 0) state_[0] = 1;
  }

  uint64_t next_u64() {
    const uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  /// Uniform in [0, n). Unbiased via rejection on the multiply-shift method.
  uint64_t uniform_u64(uint64_t n) {
    // Lemire's method with rejection.
    uint64_t x = next_u64();
    __uint128_t m = static_cast<__uint128_t>(x) * n;
    uint64_t l = static_cast<uint64_t>(m);
    if (l < n) {
      uint64_t t = (0 - n) % n;
      while (l < t) {
        x = next_u64();
        m = static_cast<__uint128_t>(x) * n;
        l = static_cast<uint64_t>(m);
      }
    }
    return static_cast<uint64_t>(m >> 64);
  }

  int64_t uniform_int(int64_t n) { return static_cast<int64_t>(uniform_u64(static_cast<uint64_t>(n))); }

  /// Uniform double in [0, 1) with 53 bits of randomness.
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform double in (0, 1]; safe as a log() argument.
  double next_double_pos() { return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53; }

  bool bernoulli(double p) { return next_double() < p; }

  /// Derive a child stream deterministically.
  RngStream fork(uint64_t stream_id) {
    return RngStream(next_u64() ^ 0xb5ad4eceda1ce2a9ULL, stream_id);
  }

 private:
  static uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
  static uint64_t splitmix64(uint64_t& x) {
    x += 0x9e3779b97f4a7c15ULL;
    uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::array<uint64_t, 4> state_;
};

}  // namespace ccdyn

#pragma once

#include <cstdint>
#include <vector>

#include "simsig/normal.hpp"

// Deterministic, platform-independent randomness. Every seeded entry point
// in the library derives per-task substreams with `substream`, so replicates
// can run concurrently and still reproduce bit-for-bit.

namespace simsig {

inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Counter-based substream derivation: independent streams for
/// (seed, stream) and optionally a second tag.
inline std::uint64_t substream(std::uint64_t seed, std::uint64_t stream,
                               std::uint64_t tag = 0) {
  return mix64(mix64(seed ^ mix64(stream + 1)) ^ mix64(tag + 0x632BE59BD9B4E019ULL));
}

/// xoshiro256++ seeded via splitmix64.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) {
    std::uint64_t sm = seed;
    for (auto& word : state_) {
      sm += 0x9E3779B97F4A7C15ULL;
      word = mix64(sm);
    }
  }

  std::uint64_t next() {
    const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  /// Unbiased draw from {0, ..., n-1} by rejection.
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t threshold = (0 - n) % n;
    for (;;) {
      std::uint64_t r = next();
      if (r >= threshold) return r % n;
    }
  }

  /// Uniform on the open interval (0, 1).
  double uniform01() {
    return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53;
  }

  double normal() { return norm_quantile(uniform01()); }

  double exponential() { return -std::log(uniform01()); }

  /// Gamma with integer shape, unit scale (sum of exponentials).
  double gamma_int_shape(int shape) {
    double s = 0.0;
    for (int i = 0; i < shape; ++i) s += exponential();
    return s;
  }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t j = v.size(); j > 1; --j) {
      std::size_t k = static_cast<std::size_t>(below(j));
      std::swap(v[j - 1], v[k]);
    }
  }

  /// Fills `perm` with a uniform random permutation of {0, ..., n-1}.
  void permutation(std::vector<std::int32_t>& perm, std::size_t n) {
    perm.resize(n);
    for (std::size_t i = 0; i < n; ++i) perm[i] = static_cast<std::int32_t>(i);
    shuffle(perm);
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }
  std::uint64_t state_[4];
};

}  // namespace simsig

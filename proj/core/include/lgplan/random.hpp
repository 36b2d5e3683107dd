#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <string_view>
#include <utility>

namespace lgplan {

// Finalizer from SplitMix64; a bijection on 64-bit words.
constexpr uint64_t mix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr uint64_t hash_combine(uint64_t seed, uint64_t value) {
  return mix64(seed ^ (mix64(value) + 0x632be59bd9b4e019ULL + (seed << 6) + (seed >> 2)));
}

// FNV-1a over bytes, then mixed. Stable across platforms and runs.
uint64_t hash_bytes(std::string_view bytes);

// Derives an independent stream seed for a named purpose ("train/init",
// "split", ...). Every random draw in the toolkit goes through this.
uint64_t derive_seed(uint64_t seed, std::string_view purpose);

// xoshiro256** seeded through SplitMix64. All distributions are implemented
// here rather than via <random> distributions so that sequences are identical
// across standard library implementations.
class Rng {
 public:
  using result_type = uint64_t;

  explicit Rng(uint64_t seed);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<uint64_t>::max(); }
  result_type operator()() { return next(); }

  uint64_t next();
  // Uniform in [0, 1) with 53 bits of precision.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  // Uniform integer in [0, n); n must be positive.
  uint64_t index(uint64_t n);
  // Uniform integer in [lo, hi] inclusive.
  int64_t range(int64_t lo, int64_t hi);
  bool bernoulli(double p) { return uniform() < p; }
  // Standard normal via Box-Muller (no cached second value).
  double normal();

  template <typename T>
  void shuffle(std::span<T> items) {
    for (size_t i = items.size(); i > 1; --i) {
      size_t j = static_cast<size_t>(index(i));
      std::swap(items[i - 1], items[j]);
    }
  }

 private:
  uint64_t s_[4];
};

}  // namespace lgplan

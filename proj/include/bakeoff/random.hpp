#pragma once

// Deterministic random streams.
//
// Every stochastic step derives its own stream from a stable 64-bit mix of
// (master seed, dataset id, resample id, purpose tag). Distributions are
// implemented here instead of using <random> distributions, whose output is
// not specified across standard library implementations.

#include <cstdint>
#include <random>
#include <span>
#include <string_view>
#include <utility>

namespace bakeoff {

/// splitmix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// 64-bit FNV-1a string hash.
constexpr std::uint64_t hash_string(std::string_view s) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

constexpr std::uint64_t combine_seed(std::uint64_t seed, std::uint64_t value) noexcept {
  return mix64(seed ^ mix64(value + 0x632be59bd9b4e019ULL));
}

constexpr std::uint64_t combine_seed(std::uint64_t seed, std::string_view tag) noexcept {
  return combine_seed(seed, hash_string(tag));
}

/// Seed for one (dataset, resample, purpose) task.
constexpr std::uint64_t derive_seed(std::uint64_t master_seed, std::string_view dataset_id,
                                    std::uint64_t resample_id, std::string_view purpose) noexcept {
  return combine_seed(combine_seed(combine_seed(mix64(master_seed), dataset_id), resample_id),
                      purpose);
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(mix64(seed)) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform integer in [0, n). Unbiased (rejection sampling).
  std::size_t uniform_index(std::size_t n) {
    const std::uint64_t bound = n;
    const std::uint64_t limit = UINT64_MAX - (UINT64_MAX % bound);
    std::uint64_t v;
    do {
      v = engine_();
    } while (v >= limit);
    return static_cast<std::size_t>(v % bound);
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) { return uniform01() < p; }

  template <typename T>
  void shuffle(std::span<T> items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      std::swap(items[i - 1], items[uniform_index(i)]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace bakeoff

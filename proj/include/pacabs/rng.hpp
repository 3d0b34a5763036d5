#pragma once

#include <cstdint>
#include <limits>

namespace pacabs {

/// Counter-based generator: output i of stream s under seed k is a pure
/// function mix(k, s, i), so per-run streams can be derived without sharing
/// state. Satisfies UniformRandomBitGenerator.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0)
      : seed_(seed), stream_(stream), key_(fmix(seed ^ fmix(stream + 0x9E3779B97F4A7C15ULL))) {}

  result_type operator()() { return fmix(key_ + (counter_++) * 0xD1B54A32D192ED03ULL); }

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }
  std::uint64_t counter() const { return counter_; }

  /// Independent stream keyed by (seed, stream-of-this ^ sub).
  CounterRng derive(std::uint64_t sub) const { return CounterRng(seed_, fmix(stream_ + 1) ^ sub); }

 private:
  static constexpr std::uint64_t fmix(std::uint64_t x) {
    x ^= x >> 30;
    x *= 0xBF58476D1CE4E5B9ULL;
    x ^= x >> 27;
    x *= 0x94D049BB133111EBULL;
    x ^= x >> 31;
    return x;
  }

  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace pacabs

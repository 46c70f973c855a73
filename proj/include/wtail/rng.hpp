#pragma once

#include <cstdint>
#include <limits>

namespace wtail {

// Counter-based generator: the i-th output is a fixed bijective hash of
// (key, i), so any stream position is reproducible without replaying the
// stream. Satisfies UniformRandomBitGenerator.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  explicit CounterRng(std::uint64_t seed, std::uint64_t counter = 0) noexcept
      : key_(mix(seed)), counter_(counter) {}

  // Sub-stream for replication `index` of a run seeded with `seed`.
  static CounterRng substream(std::uint64_t seed, std::uint64_t index) noexcept {
    return CounterRng(seed ^ index);
  }

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept { return mix(key_ + kGamma * ++counter_); }

  // Uniform double strictly inside (0, 1) on the 2^-53 grid offset by half a step.
  double uniform_open() noexcept {
    return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53;
  }

  std::uint64_t counter() const noexcept { return counter_; }

 private:
  static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;

  // SplitMix64 finalizer.
  static constexpr std::uint64_t mix(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  std::uint64_t key_;
  std::uint64_t counter_;
};

}  // namespace wtail

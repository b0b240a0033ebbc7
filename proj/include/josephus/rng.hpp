#pragma once

#include <cstdint>

// Seeded randomness for the Monte Carlo paths.
//
// Generator: SplitMix64 (Steele, Lea and Flood), state advanced by
// kGolden = 0x9E3779B97F4A7C15 and finalized with the multipliers
// 0xBF58476D1CE4E5B9 and 0x94D049BB133111EB (shifts 30, 27, 31). All
// arithmetic is on uint64_t, so streams are identical on every platform.
//
// Stream splitting: stream i of a master seed s starts from the state
//   stream_seed(s, i) = mix64(mix64(s) + (i + 1) * kGolden).
// Nested streams (trial t, then N) compose: stream_seed(stream_seed(s, t), N).
namespace josephus::rng {

inline constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t stream) {
  return mix64(mix64(seed) + (stream + 1) * kGolden);
}

class SplitMix64 {
 public:
  using result_type = std::uint64_t;

  constexpr explicit SplitMix64(std::uint64_t state) : state_(state) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }

  constexpr result_type operator()() {
    state_ += kGolden;
    return mix64(state_);
  }

  // 53 high bits scaled into [0, 1).
  constexpr double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  // True with probability p; exact at p = 0 and p = 1.
  constexpr bool bernoulli(double p) { return uniform() < p; }

 private:
  std::uint64_t state_;
};

}  // namespace josephus::rng

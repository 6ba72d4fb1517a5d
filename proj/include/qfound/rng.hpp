#pragma once

#include <array>
#include <cstdint>

namespace qfound {

/// xoshiro256** seeded through SplitMix64. Output is bit-identical across
/// platforms; no std:: distributions are involved.
///
/// Stream splitting: every (seed, shot, channel) triple gets an independent
/// generator. The key is mix(seed ^ mix(shot * 4 + channel + 1)) where mix is
/// the SplitMix64 finalizer; the four state words are the next four SplitMix64
/// outputs from that key. Shots can therefore be evaluated in any order.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  // Channel ids used by the samplers.
  static constexpr std::uint64_t kMeasureChannel = 0;
  static constexpr std::uint64_t kGateNoiseChannel = 1;
  static constexpr std::uint64_t kReadoutChannel = 2;

  static Rng stream(std::uint64_t seed, std::uint64_t shot, std::uint64_t channel);

  std::uint64_t next_u64();
  // Uniform in [0, 1) with 53 random bits.
  double uniform();
  // Uniform integer in [0, n); n > 0.
  std::uint64_t below(std::uint64_t n);

 private:
  std::array<std::uint64_t, 4> s_{};
};

std::uint64_t splitmix64_mix(std::uint64_t z);

}  // namespace qfound

#pragma once

#include <cstdint>

namespace airsched {

// Counter-based keyed RNG. Every consumer opens its own stream identified by
// (seed, stream tag, up to three indices); draws depend only on that key and
// the draw counter, never on global call order. This keeps channel
// realizations identical across schemes compared on the same round.
enum class Stream : std::uint64_t {
  kTrial = 1,
  kPlacement,
  kChannelToPs,
  kChannelToRelay,
  kRelayToPs,
  kShardData,
  kMiniBatch,
  kAggregationNoise,
  kInstanceGen,
};

std::uint64_t mix64(std::uint64_t x);

std::uint64_t derive_seed(std::uint64_t seed, Stream stream, std::uint64_t k0 = 0,
                          std::uint64_t k1 = 0, std::uint64_t k2 = 0);

class KeyedRng {
 public:
  KeyedRng(std::uint64_t seed, Stream stream, std::uint64_t k0 = 0,
           std::uint64_t k1 = 0, std::uint64_t k2 = 0);

  std::uint64_t next_u64();

  // [0, 1)
  double uniform();

  // Exponential with mean 1.
  double exponential();

  // Standard normal via Box-Muller (two uniforms per draw).
  double normal();

  // Integer in [0, bound), bound > 0.
  std::uint64_t below(std::uint64_t bound);

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace airsched

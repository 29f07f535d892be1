#include "airsched/rng.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace airsched {

namespace {
constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;
}

std::uint64_t mix64(std::uint64_t x) {
  x ^= x >> 30;
  x *= 0xbf58476d1ce4e5b9ULL;
  x ^= x >> 27;
  x *= 0x94d049bb133111ebULL;
  x ^= x >> 31;
  return x;
}

std::uint64_t derive_seed(std::uint64_t seed, Stream stream, std::uint64_t k0,
                          std::uint64_t k1, std::uint64_t k2) {
  std::uint64_t h = mix64(seed + kGolden);
  h = mix64(h + kGolden + static_cast<std::uint64_t>(stream));
  h = mix64(h + kGolden + k0);
  h = mix64(h + kGolden + k1);
  h = mix64(h + kGolden + k2);
  return h;
}

KeyedRng::KeyedRng(std::uint64_t seed, Stream stream, std::uint64_t k0,
                   std::uint64_t k1, std::uint64_t k2)
    : key_(derive_seed(seed, stream, k0, k1, k2)) {}

std::uint64_t KeyedRng::next_u64() {
  // splitmix64 step over the keyed state
  return mix64(key_ + (++counter_) * kGolden);
}

double KeyedRng::uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double KeyedRng::exponential() {
  // uniform() < 1, so the argument stays in (0, 1] and log1p is finite
  return -std::log1p(-uniform());
}

double KeyedRng::normal() {
  const double u1 = uniform();
  const double u2 = uniform();
  const double radius = std::sqrt(-2.0 * std::log1p(-u1));
  return radius * std::cos(2.0 * std::numbers::pi * u2);
}

std::uint64_t KeyedRng::below(std::uint64_t bound) {
  if (bound == 0) throw std::invalid_argument("KeyedRng::below: bound must be > 0");
  const unsigned __int128 wide =
      static_cast<unsigned __int128>(next_u64()) * static_cast<unsigned __int128>(bound);
  return static_cast<std::uint64_t>(wide >> 64);
}

}  // namespace airsched

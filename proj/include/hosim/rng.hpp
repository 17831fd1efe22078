#pragma once

#include <cstdint>
#include <random>

#include "hosim/common.hpp"

namespace hosim {

// Independent random substreams of one master seed. Each simulation concern
// (placement, shadowing, fading phases, block-error draws) gets its own
// stream so adding draws to one never perturbs another.
enum class Stream : std::uint64_t {
  kPlacement = 1,
  kShadowing = 2,
  kFading = 3,
  kBlockError = 4,
};

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

inline std::mt19937_64 make_stream(std::uint64_t master_seed, Stream stream) {
  return std::mt19937_64(
      splitmix64(splitmix64(master_seed) ^ static_cast<std::uint64_t>(stream)));
}

// Uniform draw on (0, 1]; never 0 so it is safe under log().
inline double uniform01(std::mt19937_64& eng) {
  return (static_cast<double>(eng() >> 11) + 1.0) * 0x1.0p-53;
}

inline double uniform_range(std::mt19937_64& eng, double lo, double hi) {
  return lo + (hi - lo) * uniform01(eng);
}

// Box-Muller, one value per call. Hand-rolled so draws are identical across
// standard library implementations.
inline double gaussian(std::mt19937_64& eng) {
  double u1 = uniform01(eng);
  double u2 = uniform01(eng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
}

}  // namespace hosim

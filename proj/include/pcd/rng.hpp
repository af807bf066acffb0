#pragma once

#include <cstdint>

namespace pcd {

// Counter-based random numbers: every draw is a pure function of
// (seed, sample index, coordinate), so streams are reproducible across
// platforms and independent of how work is split across threads.

inline std::uint64_t mix64(std::uint64_t z) {
  // splitmix64 finalizer
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Uniform double in [0, 1), keyed by (seed, index, coordinate).
inline double uniform01(std::uint64_t seed, std::uint64_t index, std::uint64_t coord) {
  std::uint64_t z = mix64(mix64(mix64(seed) ^ index) ^ coord);
  return static_cast<double>(z >> 11) * 0x1.0p-53;
}

}  // namespace pcd

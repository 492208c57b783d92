#pragma once

#include <cstdint>
#include <random>
#include <utility>

namespace davydov {

/// SplitMix64 finalizer; a bijection on 64-bit words with full avalanche.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Per-trajectory random stream. mt19937_64 output is fixed by the standard,
/// and the uniform and Gaussian transforms below are written out explicitly,
/// so a seed reproduces the same draws on every conforming platform.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Box-Muller pair of independent standard normals.
  std::pair<double, double> normal_pair();

  double normal() { return normal_pair().first; }

 private:
  std::mt19937_64 engine_;
};

} // namespace davydov

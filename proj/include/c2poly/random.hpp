#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace c2poly {

// splitmix64 finalizer; used to derive independent stream seeds.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Seed for stream `index` under master `seed`, optionally salted by a tag.
inline std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t index,
                                 std::uint64_t tag = 0) {
  return mix64(mix64(seed ^ mix64(tag)) + index);
}

using Rng = std::mt19937_64;

inline double uniform01(Rng& rng) {
  return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

// Radical inverse in base b (Halton coordinate), skipping index 0.
double radical_inverse(std::uint64_t i, unsigned base);

// Points of the 2D Halton sequence (bases 2, 3) with indices
// [first, first + count), shifted by a Cranley-Patterson rotation derived
// from `seed` (seed 0 means no rotation).
std::vector<std::pair<double, double>> halton2(std::uint64_t first,
                                               std::size_t count,
                                               std::uint64_t seed);

}  // namespace c2poly

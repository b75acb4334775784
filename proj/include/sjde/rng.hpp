#pragma once

#include <cstdint>
#include <random>

namespace sjde {

using Rng = std::mt19937_64;

// SplitMix64 finalizer; a bijection on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Seed of stream `index` under `master`. For a fixed master the map from index
// to seed is injective: the golden-ratio increment is odd and mix64 is a
// bijection.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  return mix64(mix64(master) + 0x9E3779B97F4A7C15ULL * (index + 1));
}

// Domain tags so design iterations, evaluations and checks never share streams.
inline constexpr std::uint64_t kDesignStream = 0x64657369676EULL;
inline constexpr std::uint64_t kEvaluateStream = 0x6576616CULL;
inline constexpr std::uint64_t kCheckStream = 0x636865636BULL;

}  // namespace sjde

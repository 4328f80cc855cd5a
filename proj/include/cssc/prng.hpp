#pragma once

#include <cstdint>
#include <random>

namespace cssc {

// Seed derivation: every randomized stage draws from an independent stream
// derived as mix_seed(base_seed, stream_index). Streams are numbered by the
// caller (trial index, restart index, fixed stage ids); the same (base, index)
// pair always yields the same stream. Mixer is splitmix64.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ull * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

inline std::mt19937_64 make_rng(std::uint64_t seed) {
  return std::mt19937_64{seed};
}

}  // namespace cssc

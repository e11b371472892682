#pragma once

// Seed splitting. Every stream used by the library is an mt19937_64 seeded
// with derive_seed(root, stream_id), where derive_seed is two rounds of
// splitmix64 over (root, stream_id). Replica r of an experiment with root
// seed s uses stream derive_seed(s, r).

#include <cstdint>
#include <random>

namespace gibbs {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t root, std::uint64_t stream) {
  return splitmix64(splitmix64(root) ^ splitmix64(stream + 0x632BE59BD9B4E019ull));
}

/// Uniform double in [0, 1) from the top 53 bits; identical on every platform.
inline double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace gibbs

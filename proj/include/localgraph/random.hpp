#pragma once

#include <cstdint>
#include <random>

namespace localgraph {

using Rng = std::mt19937_64;

// splitmix64 finalizer; used to derive independent per-node / per-trial streams
// from one user seed so results do not depend on evaluation order.
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  return seed ^ mix64(stream);
}

inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream, std::uint64_t substream) {
  return derive_seed(derive_seed(seed, stream), substream + 0x5bd1e995ULL);
}

}  // namespace localgraph

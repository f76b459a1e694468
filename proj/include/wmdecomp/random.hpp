#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace wmdecomp {

// All randomness in the library flows through this engine. mt19937_64 has a
// fully specified output sequence, and the helpers below avoid the
// implementation-defined std:: distributions so seeded results match across
// standard libraries.
using Rng = std::mt19937_64;

// Uniform integer in [0, bound) by rejection sampling. bound must be > 0.
inline std::uint64_t uniform_index(Rng& rng, std::uint64_t bound) {
  const std::uint64_t limit = UINT64_MAX - (UINT64_MAX % bound);
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % bound;
}

// Uniform real in [0, 1) with 53 bits of precision.
inline double uniform_unit(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// SplitMix64 finaliser, used to derive independent sub-seeds from one seed.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Fisher-Yates prefix: the first `count` entries of a uniform permutation of
// [0, n), i.e. a uniform sample without replacement, in draw order.
inline std::vector<std::size_t> sample_without_replacement(Rng& rng, std::size_t n,
                                                           std::size_t count) {
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  for (std::size_t i = 0; i < count && i < n; ++i) {
    const std::size_t j = i + uniform_index(rng, n - i);
    std::swap(idx[i], idx[j]);
  }
  idx.resize(count < n ? count : n);
  return idx;
}

}  // namespace wmdecomp

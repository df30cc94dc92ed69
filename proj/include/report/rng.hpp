// SPDX-License-Identifier: Apache-2.0
//
// Seed derivation. Every random stream in a run descends from one root seed
// through named sub-streams, so each component can be replayed on its own.

#ifndef REPORT_RNG_HPP
#define REPORT_RNG_HPP

#include <cstdint>
#include <algorithm>
#include <limits>
#include <random>
#include <string_view>

namespace report {

using Rng = std::mt19937_64;

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001B3ULL;
  }
  return h;
}

/// Seed of the sub-stream `name` under `seed`, optionally indexed.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::string_view name,
                                    std::uint64_t a = 0, std::uint64_t b = 0) {
  std::uint64_t h = splitmix64(seed ^ fnv1a(name));
  h = splitmix64(h ^ a);
  return splitmix64(h ^ (b * 0xD6E8FEB86659FD93ULL));
}

inline Rng make_rng(std::uint64_t seed, std::string_view name, std::uint64_t a = 0,
                    std::uint64_t b = 0) {
  return Rng(derive_seed(seed, name, a, b));
}

/// Uniform integer in [0, n). Bias-free and independent of the standard
/// library's distribution implementation.
inline std::uint64_t uniform_index(Rng& rng, std::uint64_t n) {
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % n;
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % n;
}

inline bool coin_flip(Rng& rng) { return (rng() >> 63) != 0; }

/// Uniform real in [0, 1) from the top 53 bits.
inline double uniform_real(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

template <class It>
void shuffle(It first, It last, Rng& rng) {
  const auto n = static_cast<std::uint64_t>(last - first);
  for (std::uint64_t i = n; i > 1; --i) {
    const auto j = uniform_index(rng, i);
    std::iter_swap(first + static_cast<std::ptrdiff_t>(i - 1),
                   first + static_cast<std::ptrdiff_t>(j));
  }
}

}  // namespace report

#endif  // REPORT_RNG_HPP

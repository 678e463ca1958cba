#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace refocus {

using Rng = std::mt19937_64;

/// SplitMix64 finalizer.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Derives an independent stream seed from a base seed and a list of stream
/// coordinates (sample index, family, severity, ...).
constexpr std::uint64_t mix_seed(std::uint64_t base,
                                 std::initializer_list<std::uint64_t> streams) noexcept {
  std::uint64_t h = splitmix64(base);
  for (std::uint64_t s : streams) h = splitmix64(h ^ splitmix64(s + 0x632BE59BD9B4E019ULL));
  return h;
}

}  // namespace refocus

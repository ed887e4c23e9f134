#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace emt {

using Rng = std::mt19937_64;

/// SplitMix64 finalizer; used for seed derivation and feature hashing.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t fnv1a(std::string_view s) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

/// Independent stream seed for a named consumer ("shuffle", "scorer", ...)
/// of one master run seed.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::string_view stream) noexcept {
  return mix64(mix64(master) ^ fnv1a(stream));
}

/// Uniform direction on the unit sphere in R^d.
std::vector<double> random_unit_vector(std::size_t d, Rng& rng);

}  // namespace emt

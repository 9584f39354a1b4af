#pragma once

#include <cstdint>
#include <random>

namespace dcqe {

using Rng = std::mt19937_64;

/// Independent random streams used inside one simulated interval. Keeping
/// them apart is what makes the port-pair sequence independent of delays
/// and detector settings.
enum class RngStream : std::uint64_t {
  emission = 1,
  outcomes = 2,
  detect_signal = 3,
  detect_idler = 4,
  dark = 5,
};

/// splitmix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Seed-splitting rule: child = mix64(mix64(parent) ^ mix64(index + 1)).
/// Stable across releases; scan point k of a run uses
/// derive_seed(master_seed, k).
constexpr std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t index) {
  return mix64(mix64(parent) ^ mix64(index + 1));
}

inline Rng make_rng(std::uint64_t seed, RngStream stream) {
  return Rng{derive_seed(seed, static_cast<std::uint64_t>(stream))};
}

}  // namespace dcqe

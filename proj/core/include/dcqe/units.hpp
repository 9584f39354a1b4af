#pragma once

#include <cstdint>
#include <numbers>

namespace dcqe {

/// Timestamps are unsigned integer picoseconds since the start of a run.
using TimePs = std::uint64_t;
/// Signed picosecond offsets (electrical delays, coincidence compensation).
using OffsetPs = std::int64_t;

inline constexpr double kSpeedOfLight = 299'792'458.0;  // m/s
inline constexpr double kPsPerSecond = 1e12;
inline constexpr double kPi = std::numbers::pi;

constexpr double degrees(double deg) { return deg * kPi / 180.0; }
constexpr double to_degrees(double rad) { return rad * 180.0 / kPi; }

}  // namespace dcqe

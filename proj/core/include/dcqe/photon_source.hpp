#pragma once

#include "dcqe/quantum_state.hpp"
#include "dcqe/units.hpp"

#include <cstdint>
#include <vector>

namespace dcqe {

enum class SourceKind {
  entangled,       ///< (|HH> + e^{i alpha}|VV>)/sqrt2, HH-VV coherence scaled by v
  mixed_diagonal,  ///< 1/2 |+45,+45><.| + 1/2 |-45,-45><.|
  mixed_hv,        ///< 1/2 |HH><HH| + 1/2 |VV><VV|
};

struct SourceSpec {
  SourceKind kind = SourceKind::entangled;
  double alpha = 0.0;       ///< relative phase of the |VV> term, radians
  double coherence = 0.73;  ///< v: stands in for precompensation and alignment quality
  double pair_rate = 20000.0;  ///< pairs per second
  double duration = 5.0;       ///< seconds

  void validate() const;
  bool operator==(const SourceSpec&) const = default;
};

/// One run's emissions. A stationary source prepares a single state per
/// run; every pair's outcome is drawn i.i.d. from it.
struct EmissionSchedule {
  TwoPhotonState prepared_state;
  std::vector<TimePs> times;  ///< strictly increasing
};

/// Guard on rate x duration.
inline constexpr double kMaxExpectedPairs = 1e9;

TwoPhotonState prepare_state(const SourceSpec& spec);

/// Homogeneous Poisson process of rate `pair_rate` over `duration`,
/// deterministic for a given seed. Throws ResourceError when
/// rate x duration exceeds 1e9.
EmissionSchedule emit_pairs(const SourceSpec& spec, std::uint64_t seed);

/// Emission times only; what emit_pairs uses internally.
std::vector<TimePs> emission_times(double pair_rate, double duration, std::uint64_t seed);

/// Same half-wave plate at `theta` on both photons.
TwoPhotonState joint_hwp_rotation(const TwoPhotonState& state, double theta);

}  // namespace dcqe

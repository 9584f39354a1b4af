#pragma once

#include "dcqe/coincidence.hpp"
#include "dcqe/event_timeline.hpp"
#include "dcqe/optics.hpp"
#include "dcqe/photon_source.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

namespace dcqe {

struct ScanSchedule {
  double start_um = 0.0;
  double step_um = 0.44;
  int n_steps = 40;
  double dwell_s = 5.0;

  bool operator==(const ScanSchedule&) const = default;
};

/// One complete experimental arrangement.
struct BenchConfig {
  SourceSpec source;
  ArmGeometry signal_arm;
  ArmGeometry idler_arm;
  std::array<DetectorSpec, 4> detectors{};  ///< indexed by `index(Detector)`
  double signal_hwp = degrees(22.5);
  double idler_hwp = degrees(22.5);
  /// Joint HWP rotation of both photons right after the crystal.
  std::optional<double> source_rotation;
  std::vector<double> mirror_deltas;  ///< idler arm, radians each
  std::optional<BlockedPath> beam_block;
  CoincidenceSpec coincidence;
  ScanSchedule scan;
  ActuatorCalibration calibration;
  std::uint64_t master_seed = 1;

  /// Throws DomainError naming the offending field.
  void validate() const;
  bool operator==(const BenchConfig&) const = default;

  const DetectorSpec& detector(Detector d) const { return detectors[index(d)]; }
  DetectorSpec& detector(Detector d) { return detectors[index(d)]; }
};

/// One scan point: actuator position, the phase it maps to, and the counts.
struct ScanRow {
  double actuator_um = 0.0;
  double delta_phi_rad = 0.0;
  CountTable counts;

  bool operator==(const ScanRow&) const = default;
};

}  // namespace dcqe

#pragma once

#include "dcqe/polarization_operator.hpp"
#include "dcqe/units.hpp"

namespace dcqe {

/// Output port of a polarizing beamsplitter. Convention: transmitted = V,
/// reflected = H.
enum class Port { transmitted, reflected };

/// Analyzer setting: HWP fast-axis angle (radians from vertical, kept in
/// [0, pi)) followed by one PBS port.
class MeasurementSetting {
 public:
  MeasurementSetting(double hwp_angle, Port port);

  double hwp_angle() const noexcept { return hwp_angle_; }
  Port port() const noexcept { return port_; }

  bool operator==(const MeasurementSetting&) const = default;

 private:
  double hwp_angle_;
  Port port_;
};

/// Standard HWP Jones matrix [[cos 2t, sin 2t], [sin 2t, -cos 2t]].
PolarizationOperator half_wave_plate(double theta);

/// Relative phase between the |H> and |V> paths of the beam-displacing
/// interferometer: diag(1, e^{i dphi}).
PolarizationOperator interferometer_phase(double delta_phi);

/// Transmitted -> |V><V|, reflected -> |H><H|.
PolarizationOperator pbs_projector(Port port);

/// HWP followed by PBS port, as a projector on the pre-HWP polarization:
/// U^dag P_port U. At 22.5 deg the reflected port selects |+45> and the
/// transmitted port |-45>; at 0 deg they select |H> and |V>.
PolarizationOperator analyzer_projector(const MeasurementSetting& setting);

/// Dielectric mirror: s-p phase shift, s/p aligned with H/V.
PolarizationOperator mirror(double delta);

enum class BlockedPath { h_path, v_path };

/// Beam block in one interferometer path: projector onto the other
/// polarization (blocking the V path leaves |H><H|).
PolarizationOperator beam_block(BlockedPath path);

/// Linear actuator-position to interferometer-phase map.
struct ActuatorCalibration {
  double radians_per_micron = 2.0 * kPi / 4.4;
  double origin_offset = 0.0;

  void validate() const;
  bool operator==(const ActuatorCalibration&) const = default;
};

double actuator_to_phase(double position_um, const ActuatorCalibration& cal);

}  // namespace dcqe

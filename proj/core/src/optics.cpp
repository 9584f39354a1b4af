#include "dcqe/optics.hpp"

#include "dcqe/errors.hpp"

#include <cmath>
#include <string>

namespace dcqe {

PolarizationOperator::PolarizationOperator(const Matrix2& matrix, Kind kind)
    : matrix_(matrix), kind_(kind) {
  if (!matrix.allFinite()) throw DomainError("polarization operator has non-finite entries");
  if (kind == Kind::unitary) {
    const double err = (matrix.adjoint() * matrix - Matrix2::Identity()).cwiseAbs().maxCoeff();
    if (err > kTransformTolerance) {
      throw DomainError("operator declared unitary violates U^dag U = I by " + std::to_string(err));
    }
  } else {
    const double idem = (matrix * matrix - matrix).cwiseAbs().maxCoeff();
    const double herm = (matrix - matrix.adjoint()).cwiseAbs().maxCoeff();
    if (idem > kTransformTolerance || herm > kTransformTolerance) {
      throw DomainError("operator declared projector is not idempotent and Hermitian");
    }
  }
}

PolarizationOperator PolarizationOperator::identity() {
  return {Matrix2::Identity(), Kind::unitary};
}

PolarizationOperator operator*(const PolarizationOperator& lhs, const PolarizationOperator& rhs) {
  if (!lhs.is_unitary() || !rhs.is_unitary()) {
    throw DomainError("only unitary polarization operators compose");
  }
  return {lhs.matrix() * rhs.matrix(), PolarizationOperator::Kind::unitary};
}

Matrix4 kron(const Matrix2& signal, const Matrix2& idler) {
  Matrix4 out;
  for (int r = 0; r < 2; ++r) {
    for (int c = 0; c < 2; ++c) {
      out.block<2, 2>(2 * r, 2 * c) = signal(r, c) * idler;
    }
  }
  return out;
}

namespace {

double normalize_angle(double angle) {
  if (!std::isfinite(angle)) throw DomainError("analyzer angle must be finite");
  double a = std::fmod(angle, kPi);
  if (a < 0.0) a += kPi;
  if (a >= kPi) a = 0.0;
  return a;
}

}  // namespace

MeasurementSetting::MeasurementSetting(double hwp_angle, Port port)
    : hwp_angle_(normalize_angle(hwp_angle)), port_(port) {}

PolarizationOperator half_wave_plate(double theta) {
  if (!std::isfinite(theta)) throw DomainError("half-wave plate angle must be finite");
  const double c = std::cos(2.0 * theta);
  const double s = std::sin(2.0 * theta);
  Matrix2 m;
  m << c, s, s, -c;
  return {m, PolarizationOperator::Kind::unitary};
}

PolarizationOperator interferometer_phase(double delta_phi) {
  if (!std::isfinite(delta_phi)) throw DomainError("interferometer phase must be finite");
  Matrix2 m = Matrix2::Zero();
  m(0, 0) = 1.0;
  m(1, 1) = std::polar(1.0, delta_phi);
  return {m, PolarizationOperator::Kind::unitary};
}

PolarizationOperator pbs_projector(Port port) {
  Matrix2 m = Matrix2::Zero();
  if (port == Port::transmitted) {
    m(1, 1) = 1.0;
  } else {
    m(0, 0) = 1.0;
  }
  return {m, PolarizationOperator::Kind::projector};
}

PolarizationOperator analyzer_projector(const MeasurementSetting& setting) {
  const Matrix2 u = half_wave_plate(setting.hwp_angle()).matrix();
  const Matrix2 p = pbs_projector(setting.port()).matrix();
  Matrix2 m = u.adjoint() * p * u;
  // Symmetrize away rounding so the projector check sees an exact P = P^dag.
  m = 0.5 * (m + m.adjoint()).eval();
  return {m, PolarizationOperator::Kind::projector};
}

PolarizationOperator mirror(double delta) {
  if (!std::isfinite(delta)) throw DomainError("mirror phase must be finite");
  Matrix2 m = Matrix2::Zero();
  m(0, 0) = 1.0;
  m(1, 1) = std::polar(1.0, delta);
  return {m, PolarizationOperator::Kind::unitary};
}

PolarizationOperator beam_block(BlockedPath path) {
  return pbs_projector(path == BlockedPath::v_path ? Port::reflected : Port::transmitted);
}

void ActuatorCalibration::validate() const {
  if (!(radians_per_micron > 0.0) || !std::isfinite(radians_per_micron)) {
    throw DomainError("calibration.radians_per_micron must be > 0");
  }
  if (!std::isfinite(origin_offset)) throw DomainError("calibration.origin_offset must be finite");
}

double actuator_to_phase(double position_um, const ActuatorCalibration& cal) {
  if (!std::isfinite(position_um)) throw DomainError("actuator position must be finite");
  cal.validate();
  return cal.origin_offset + cal.radians_per_micron * position_um;
}

}  // namespace dcqe

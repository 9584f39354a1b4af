#pragma once

#include "dcqe/optics.hpp"
#include "dcqe/polarization_operator.hpp"

#include <optional>

namespace dcqe {

inline constexpr double kConstructionTolerance = 1e-12;
inline constexpr double kPsdTolerance = 1e-10;

enum class Photon { signal, idler };

/// 2x2 polarization density matrix in the (|H>, |V>) basis.
class SinglePhotonState {
 public:
  explicit SinglePhotonState(const Matrix2& rho, double tolerance = kConstructionTolerance);

  static SinglePhotonState from_pure(const Vector2& amplitudes);

  const Matrix2& matrix() const noexcept { return rho_; }

  /// tr(rho P).
  double probability(const PolarizationOperator& projector) const;

 private:
  Matrix2 rho_;
};

/// Two-photon polarization density matrix.
///
/// The basis order is fixed: |HH>, |HV>, |VH>, |VV>, with the signal photon
/// as the first tensor factor and the idler as the second. Every instance is
/// Hermitian, unit-trace and positive semidefinite; construction validates
/// this and throws DomainError otherwise. Equality of states is only ever a
/// matrix-distance question (see `distance`), so global phases never matter.
class TwoPhotonState {
 public:
  /// Normalized |psi><psi| from four amplitudes in the basis order above.
  static TwoPhotonState from_pure(const Vector4& amplitudes);

  /// Validated density matrix. `tolerance` bounds the Hermiticity and trace
  /// error; eigenvalues must be >= -1e-10.
  static TwoPhotonState from_density(const Matrix4& rho,
                                     double tolerance = kConstructionTolerance);

  /// rho_signal (x) rho_idler.
  static TwoPhotonState product(const SinglePhotonState& signal, const SinglePhotonState& idler);

  const Matrix4& matrix() const noexcept { return rho_; }

  /// Max-abs entry difference between two density matrices.
  static double distance(const TwoPhotonState& a, const TwoPhotonState& b);

 private:
  explicit TwoPhotonState(const Matrix4& rho) : rho_(rho) {}

  Matrix4 rho_;
};

/// Result of a local operation. For unitary inputs `probability` is 1 and
/// `state` is always set; for projector inputs `probability` is the survival
/// probability tr((P_s (x) P_i) rho) and `state` is the renormalized
/// post-selection state, absent when nothing survives.
struct LocalResult {
  std::optional<TwoPhotonState> state;
  double probability = 0.0;
};

LocalResult apply_local(const TwoPhotonState& state, const PolarizationOperator& op_signal,
                        const PolarizationOperator& op_idler);

/// apply_local for unitary operators only; throws DomainError on a projector.
TwoPhotonState transform(const TwoPhotonState& state, const PolarizationOperator& op_signal,
                         const PolarizationOperator& op_idler);

/// Unnormalized (A (x) B) rho (A (x) B)^dag, no validation. Used when a
/// projector is part of an optical chain and the lost branch must be kept.
Matrix4 conjugate(const Matrix4& rho, const Matrix2& op_signal, const Matrix2& op_idler);

SinglePhotonState partial_trace(const TwoPhotonState& state, Photon keep);

/// Born rule tr(rho (P_signal (x) P_idler)) for two analyzer settings.
double joint_probability(const TwoPhotonState& state, const MeasurementSetting& signal,
                         const MeasurementSetting& idler);

/// Scales the |HH><VV| and |VV><HH| coherences by v in [0, 1]. Throws
/// DomainError for v outside [0, 1], or when the input carries other
/// coherences that make the result non-positive.
TwoPhotonState dephase(const TwoPhotonState& state, double v);

/// Checks the density-matrix invariants without constructing a state.
bool is_valid_density(const Matrix4& rho, double tolerance = kTransformTolerance);

}  // namespace dcqe

#pragma once

#include <Eigen/Dense>

#include <complex>

namespace dcqe {

using Complex = std::complex<double>;
using Matrix2 = Eigen::Matrix2cd;
using Matrix4 = Eigen::Matrix4cd;
using Vector2 = Eigen::Vector2cd;
using Vector4 = Eigen::Vector4cd;

inline constexpr double kTransformTolerance = 1e-10;

/// 2x2 Jones operator on one photon's polarization in the (H, V) basis.
/// Construction checks the declared kind: unitary (U^dag U = I) or
/// projector (P^2 = P = P^dag), both within 1e-10.
class PolarizationOperator {
 public:
  enum class Kind { unitary, projector };

  PolarizationOperator(const Matrix2& matrix, Kind kind);

  static PolarizationOperator identity();

  const Matrix2& matrix() const noexcept { return matrix_; }
  Kind kind() const noexcept { return kind_; }
  bool is_unitary() const noexcept { return kind_ == Kind::unitary; }

  Vector2 apply(const Vector2& v) const { return matrix_ * v; }

 private:
  Matrix2 matrix_;
  Kind kind_;
};

/// Composition `lhs * rhs` (rhs acts first). Only unitaries compose.
PolarizationOperator operator*(const PolarizationOperator& lhs, const PolarizationOperator& rhs);

/// Kronecker product, signal factor first.
Matrix4 kron(const Matrix2& signal, const Matrix2& idler);

}  // namespace dcqe

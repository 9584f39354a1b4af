#include "dcqe/quantum_state.hpp"

#include "dcqe/errors.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <string>

namespace dcqe {

namespace {

template <typename M>
bool density_ok(const M& rho, double tolerance, std::string* why) {
  if (!rho.allFinite()) {
    if (why) *why = "non-finite entries";
    return false;
  }
  const double herm = (rho - rho.adjoint()).cwiseAbs().maxCoeff();
  if (herm > tolerance) {
    if (why) *why = "not Hermitian (max deviation " + std::to_string(herm) + ")";
    return false;
  }
  const double tr_err = std::abs(rho.trace() - Complex(1.0, 0.0));
  if (tr_err > tolerance) {
    if (why) *why = "trace differs from 1 by " + std::to_string(tr_err);
    return false;
  }
  const M sym = 0.5 * (rho + rho.adjoint());
  Eigen::SelfAdjointEigenSolver<M> solver(sym, Eigen::EigenvaluesOnly);
  const double min_eig = solver.eigenvalues().minCoeff();
  if (min_eig < -kPsdTolerance) {
    if (why) *why = "not positive semidefinite (eigenvalue " + std::to_string(min_eig) + ")";
    return false;
  }
  return true;
}

}  // namespace

SinglePhotonState::SinglePhotonState(const Matrix2& rho, double tolerance) : rho_(rho) {
  std::string why;
  if (!density_ok(rho, tolerance, &why)) throw DomainError("invalid single-photon state: " + why);
}

SinglePhotonState SinglePhotonState::from_pure(const Vector2& amplitudes) {
  const double norm = amplitudes.norm();
  if (!(norm > 0.0)) throw DomainError("single-photon amplitudes must be non-zero");
  const Vector2 psi = amplitudes / norm;
  return SinglePhotonState(psi * psi.adjoint());
}

double SinglePhotonState::probability(const PolarizationOperator& projector) const {
  return (rho_ * projector.matrix()).trace().real();
}

TwoPhotonState TwoPhotonState::from_pure(const Vector4& amplitudes) {
  const double norm = amplitudes.norm();
  if (!(norm > 0.0) || !std::isfinite(norm)) {
    throw DomainError("two-photon amplitudes must be a finite non-zero vector");
  }
  const Vector4 psi = amplitudes / norm;
  return from_density(psi * psi.adjoint());
}

TwoPhotonState TwoPhotonState::from_density(const Matrix4& rho, double tolerance) {
  std::string why;
  if (!density_ok(rho, tolerance, &why)) throw DomainError("invalid two-photon state: " + why);
  return TwoPhotonState(rho);
}

TwoPhotonState TwoPhotonState::product(const SinglePhotonState& signal,
                                       const SinglePhotonState& idler) {
  return from_density(kron(signal.matrix(), idler.matrix()));
}

double TwoPhotonState::distance(const TwoPhotonState& a, const TwoPhotonState& b) {
  return (a.rho_ - b.rho_).cwiseAbs().maxCoeff();
}

bool is_valid_density(const Matrix4& rho, double tolerance) {
  return density_ok(rho, tolerance, nullptr);
}

Matrix4 conjugate(const Matrix4& rho, const Matrix2& op_signal, const Matrix2& op_idler) {
  const Matrix4 k = kron(op_signal, op_idler);
  return k * rho * k.adjoint();
}

LocalResult apply_local(const TwoPhotonState& state, const PolarizationOperator& op_signal,
                        const PolarizationOperator& op_idler) {
  const Matrix4 out = conjugate(state.matrix(), op_signal.matrix(), op_idler.matrix());
  if (op_signal.is_unitary() && op_idler.is_unitary()) {
    return {TwoPhotonState::from_density(out, kTransformTolerance), 1.0};
  }
  const double p = out.trace().real();
  if (p <= kTransformTolerance) return {std::nullopt, p < 0.0 ? 0.0 : p};
  return {TwoPhotonState::from_density(out / p, kTransformTolerance), p};
}

TwoPhotonState transform(const TwoPhotonState& state, const PolarizationOperator& op_signal,
                         const PolarizationOperator& op_idler) {
  if (!op_signal.is_unitary() || !op_idler.is_unitary()) {
    throw DomainError("transform() takes unitary operators; use apply_local for projectors");
  }
  return *apply_local(state, op_signal, op_idler).state;
}

SinglePhotonState partial_trace(const TwoPhotonState& state, Photon keep) {
  const Matrix4& rho = state.matrix();
  Matrix2 out = Matrix2::Zero();
  // Index of |s i> is 2*s + i.
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      for (int k = 0; k < 2; ++k) {
        out(a, b) += keep == Photon::signal ? rho(2 * a + k, 2 * b + k) : rho(2 * k + a, 2 * k + b);
      }
    }
  }
  return SinglePhotonState(out, kTransformTolerance);
}

double joint_probability(const TwoPhotonState& state, const MeasurementSetting& signal,
                         const MeasurementSetting& idler) {
  const Matrix4 p = kron(analyzer_projector(signal).matrix(), analyzer_projector(idler).matrix());
  const double prob = (state.matrix() * p).trace().real();
  if (prob < 0.0) return 0.0;
  return prob > 1.0 ? 1.0 : prob;
}

TwoPhotonState dephase(const TwoPhotonState& state, double v) {
  if (!(v >= 0.0 && v <= 1.0)) throw DomainError("coherence v must lie in [0, 1]");
  Matrix4 rho = state.matrix();
  rho(0, 3) *= v;
  rho(3, 0) *= v;
  return TwoPhotonState::from_density(rho, kTransformTolerance);
}

}  // namespace dcqe

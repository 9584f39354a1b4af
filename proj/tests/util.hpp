#pragma once

#include "dcqe/quantum_state.hpp"
#include "oracle.hpp"

#include <random>

namespace testutil {

inline oracle::Density to_oracle(const dcqe::Matrix4& m) {
  oracle::Density d{};
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) d[r][c] = m(r, c);
  return d;
}

/// Random mixed state: G G^dag / tr with complex Gaussian G.
inline dcqe::TwoPhotonState random_state(std::mt19937_64& rng) {
  std::normal_distribution<double> n;
  dcqe::Matrix4 g;
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) g(r, c) = {n(rng), n(rng)};
  dcqe::Matrix4 rho = g * g.adjoint();
  rho /= rho.trace();
  rho = 0.5 * (rho + rho.adjoint()).eval();
  return dcqe::TwoPhotonState::from_density(rho);
}

inline dcqe::Matrix2 random_unitary(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 2.0 * dcqe::kPi);
  const double a = u(rng), b = u(rng), c = u(rng), t = u(rng) / 4.0;
  const std::complex<double> x = std::polar(std::cos(t), a);
  const std::complex<double> y = std::polar(std::sin(t), b);
  const std::complex<double> g = std::polar(1.0, c);
  dcqe::Matrix2 m;
  m << x, y, -std::conj(y) * g, std::conj(x) * g;
  return m;
}

}  // namespace testutil

#include "dcqe/photon_source.hpp"

#include "dcqe/errors.hpp"
#include "dcqe/rng.hpp"

#include <cmath>

namespace dcqe {

void SourceSpec::validate() const {
  if (!(pair_rate > 0.0) || !std::isfinite(pair_rate)) {
    throw DomainError("source.pair_rate must be > 0");
  }
  if (!(duration > 0.0) || !std::isfinite(duration)) {
    throw DomainError("source.duration must be > 0");
  }
  if (!(coherence >= 0.0 && coherence <= 1.0)) {
    throw DomainError("source.coherence must lie in [0, 1]");
  }
  if (!std::isfinite(alpha)) throw DomainError("source.alpha must be finite");
}

TwoPhotonState prepare_state(const SourceSpec& spec) {
  spec.validate();
  const double r = 1.0 / std::sqrt(2.0);
  switch (spec.kind) {
    case SourceKind::entangled: {
      Vector4 psi = Vector4::Zero();
      psi(0) = r;
      psi(3) = std::polar(r, spec.alpha);
      return dephase(TwoPhotonState::from_pure(psi), spec.coherence);
    }
    case SourceKind::mixed_diagonal: {
      Vector2 plus;
      plus << r, r;
      Vector2 minus;
      minus << r, -r;
      const Matrix2 pp = plus * plus.adjoint();
      const Matrix2 mm = minus * minus.adjoint();
      return TwoPhotonState::from_density(0.5 * kron(pp, pp) + 0.5 * kron(mm, mm));
    }
    case SourceKind::mixed_hv: {
      Matrix4 rho = Matrix4::Zero();
      rho(0, 0) = 0.5;
      rho(3, 3) = 0.5;
      return TwoPhotonState::from_density(rho);
    }
  }
  throw DomainError("unknown source kind");
}

std::vector<TimePs> emission_times(double pair_rate, double duration, std::uint64_t seed) {
  if (!(pair_rate >= 0.0) || !(duration >= 0.0)) {
    throw DomainError("emission rate and duration must be non-negative");
  }
  const double expected = pair_rate * duration;
  if (expected > kMaxExpectedPairs) {
    throw ResourceError("rate x duration = " + std::to_string(expected) + " exceeds 1e9 pairs");
  }
  std::vector<TimePs> times;
  if (pair_rate == 0.0 || duration == 0.0) return times;
  times.reserve(static_cast<std::size_t>(expected + 6.0 * std::sqrt(expected) + 16.0));

  Rng rng{seed};
  std::exponential_distribution<double> gap(pair_rate);
  double t = 0.0;
  TimePs last = 0;
  bool first = true;
  while (true) {
    t += gap(rng);
    if (t >= duration) break;
    auto tick = static_cast<TimePs>(std::llround(t * kPsPerSecond));
    if (!first && tick <= last) tick = last + 1;
    times.push_back(tick);
    last = tick;
    first = false;
  }
  return times;
}

EmissionSchedule emit_pairs(const SourceSpec& spec, std::uint64_t seed) {
  spec.validate();
  return {prepare_state(spec), emission_times(spec.pair_rate, spec.duration, seed)};
}

TwoPhotonState joint_hwp_rotation(const TwoPhotonState& state, double theta) {
  const auto hwp = half_wave_plate(theta);
  return transform(state, hwp, hwp);
}

}  // namespace dcqe

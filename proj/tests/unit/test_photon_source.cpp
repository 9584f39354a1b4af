#include "dcqe/errors.hpp"
#include "dcqe/optics.hpp"
#include "dcqe/photon_source.hpp"
#include "util.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace dcqe;

namespace {

const double s2 = 1.0 / std::sqrt(2.0);

double all_probs_diff(const TwoPhotonState& a, const TwoPhotonState& b, double ts, double ti) {
  double worst = 0.0;
  for (Port ps : {Port::transmitted, Port::reflected})
    for (Port pi : {Port::transmitted, Port::reflected}) {
      const MeasurementSetting s(ts, ps), i(ti, pi);
      worst = std::max(worst, std::abs(joint_probability(a, s, i) - joint_probability(b, s, i)));
    }
  return worst;
}

SourceSpec spec(SourceKind kind, double v = 1.0) {
  SourceSpec s;
  s.kind = kind;
  s.coherence = v;
  return s;
}

}  // namespace

TEST(PrepareState, EntangledIsBell) {
  const auto bell = TwoPhotonState::from_pure(Vector4(s2, 0, 0, s2));
  EXPECT_LT(TwoPhotonState::distance(prepare_state(spec(SourceKind::entangled)), bell), 1e-15);
}

TEST(PrepareState, AlphaPhase) {
  SourceSpec s = spec(SourceKind::entangled);
  s.alpha = 0.4;
  EXPECT_NEAR(std::arg(prepare_state(s).matrix()(3, 0)), 0.4, 1e-15);
}

TEST(PrepareState, MixedHv) {
  Matrix4 m = Matrix4::Zero();
  m(0, 0) = m(3, 3) = 0.5;
  EXPECT_LT((prepare_state(spec(SourceKind::mixed_hv)).matrix() - m).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(PrepareState, MixedDiagonalByBruteForce) {
  // 1/2 |++><++| + 1/2 |--><--| expanded entry by entry
  const double p[4] = {0.5, 0.5, 0.5, 0.5};
  const double m[4] = {0.5, -0.5, -0.5, 0.5};
  const Matrix4& got = prepare_state(spec(SourceKind::mixed_diagonal)).matrix();
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) {
      const double want = 0.5 * p[r] * p[c] + 0.5 * m[r] * m[c];
      EXPECT_NEAR(std::abs(got(r, c) - want), 0.0, 1e-15) << r << "," << c;
    }
  // the HH-VV coherence is 1/4, the HV-VH coherence 1/4, the rest 1/8 magnitude or 0
  EXPECT_NEAR(got(0, 3).real(), 0.25, 1e-15);
  EXPECT_NEAR(got(0, 1).real(), 0.0, 1e-15);
}

TEST(PrepareState, AlwaysValid) {
  for (double v = 0.0; v <= 1.0; v += 0.1) {
    EXPECT_TRUE(is_valid_density(prepare_state(spec(SourceKind::entangled, v)).matrix()));
  }
  SourceSpec bad = spec(SourceKind::entangled, 1.2);
  EXPECT_THROW(prepare_state(bad), DomainError);
}

TEST(JointRotation, EntangledInvariant) {
  const auto bell = prepare_state(spec(SourceKind::entangled));
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> angle(0.0, kPi);
  for (double th = 0.0; th <= degrees(30.0) + 1e-12; th += degrees(2.5)) {
    const auto rot = joint_hwp_rotation(bell, th);
    for (int k = 0; k < 10; ++k) EXPECT_LT(all_probs_diff(rot, bell, angle(rng), angle(rng)), 1e-10);
  }
  for (double th : {0.7, 1.9, -2.4}) {
    EXPECT_LT(all_probs_diff(joint_hwp_rotation(bell, th), bell, degrees(22.5), 0.0), 1e-10);
  }
}

TEST(JointRotation, MixedHvToMixedDiagonal) {
  const auto rot = joint_hwp_rotation(prepare_state(spec(SourceKind::mixed_hv)), degrees(22.5));
  EXPECT_LT(TwoPhotonState::distance(rot, prepare_state(spec(SourceKind::mixed_diagonal))), 1e-12);
}

TEST(JointRotation, ZeroAngleIsSignFlipConjugation) {
  std::mt19937_64 rng(6);
  const auto s = testutil::random_state(rng);
  Matrix2 z = Matrix2::Zero();
  z(0, 0) = 1;
  z(1, 1) = -1;
  const Matrix4 expected = conjugate(s.matrix(), z, z);
  EXPECT_LT((joint_hwp_rotation(s, 0.0).matrix() - expected).cwiseAbs().maxCoeff(), 1e-15);
  const auto hv = prepare_state(spec(SourceKind::mixed_hv));
  EXPECT_LT(TwoPhotonState::distance(joint_hwp_rotation(hv, 0.0), hv), 1e-15);
}

TEST(MixedHv, NoInterferenceAnywhere) {
  const auto hv = prepare_state(spec(SourceKind::mixed_hv));
  for (double ts = 0.0; ts < kPi; ts += 0.3)
    for (double ti = 0.0; ti < kPi; ti += 0.3)
      for (Port ps : {Port::transmitted, Port::reflected})
        for (Port pi : {Port::transmitted, Port::reflected}) {
          double lo = 1, hi = 0;
          for (int k = 0; k < 64; ++k) {
            const auto s = transform(hv, interferometer_phase(2 * kPi * k / 64), PolarizationOperator::identity());
            const double p = joint_probability(s, MeasurementSetting(ts, ps), MeasurementSetting(ti, pi));
            lo = std::min(lo, p);
            hi = std::max(hi, p);
          }
          EXPECT_LT(hi - lo, 1e-10);
        }
}

TEST(EmitPairs, CountWithinPoissonBand) {
  SourceSpec s;
  s.pair_rate = 1000;
  s.duration = 5;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto n = static_cast<double>(emit_pairs(s, seed).times.size());
    EXPECT_LT(std::abs(n - 5000.0), 5 * std::sqrt(5000.0));
  }
}

TEST(EmitPairs, DeterministicAndStrictlyIncreasing) {
  SourceSpec s;
  s.pair_rate = 50000;
  s.duration = 1;
  const auto a = emit_pairs(s, 42);
  const auto b = emit_pairs(s, 42);
  EXPECT_EQ(a.times, b.times);
  EXPECT_NE(a.times, emit_pairs(s, 43).times);
  for (std::size_t k = 1; k < a.times.size(); ++k) ASSERT_LT(a.times[k - 1], a.times[k]);
}

TEST(EmitPairs, TinyDurationIsEmpty) {
  EXPECT_TRUE(emission_times(1000.0, 1e-15, 1).empty());
  EXPECT_TRUE(emission_times(0.0, 5.0, 1).empty());
}

TEST(EmitPairs, ResourceGuard) {
  EXPECT_THROW(emission_times(1e9, 2.0, 1), ResourceError);
}

TEST(EmitPairs, ExponentialGapsPassKs) {
  const double rate = 1e4;
  const auto t = emission_times(rate, 10.0, 7);
  ASSERT_GT(t.size(), 100000u - 2000u);
  std::vector<double> gaps;
  for (std::size_t k = 1; k <= 100000 && k < t.size(); ++k) {
    gaps.push_back(static_cast<double>(t[k] - t[k - 1]) / kPsPerSecond);
  }
  const double crit = 1.63 / std::sqrt(static_cast<double>(gaps.size()));  // alpha = 0.01
  EXPECT_LT(oracle::ks_exponential(gaps, rate), crit);
}

#include "dcqe/errors.hpp"
#include "dcqe/optics.hpp"
#include "dcqe/quantum_state.hpp"
#include "util.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace dcqe;

namespace {

const double s2 = 1.0 / std::sqrt(2.0);

TwoPhotonState bell() { return TwoPhotonState::from_pure(Vector4(s2, 0, 0, s2)); }

double max_abs(const Matrix4& m) { return m.cwiseAbs().maxCoeff(); }

TwoPhotonState eq5(double dphi) { return transform(bell(), interferometer_phase(dphi), PolarizationOperator::identity()); }

}  // namespace

TEST(FromPure, BellStateEntries) {
  const Matrix4& m = bell().matrix();
  Matrix4 expected = Matrix4::Zero();
  expected(0, 0) = expected(0, 3) = expected(3, 0) = expected(3, 3) = 0.5;
  EXPECT_LT(max_abs(m - expected), 1e-15);
}

TEST(FromPure, BasisStateAndNormalization) {
  const auto hh = TwoPhotonState::from_pure(Vector4(1, 0, 0, 0));
  Matrix4 expected = Matrix4::Zero();
  expected(0, 0) = 1.0;
  EXPECT_LT(max_abs(hh.matrix() - expected), 1e-15);
  const auto scaled = TwoPhotonState::from_pure(Vector4(2, 0, 0, 0));
  EXPECT_LT(TwoPhotonState::distance(hh, scaled), 1e-15);
}

TEST(FromPure, ZeroVectorThrows) {
  EXPECT_THROW(TwoPhotonState::from_pure(Vector4::Zero()), DomainError);
}

TEST(FromDensity, RejectsInvalid) {
  Matrix4 m = Matrix4::Zero();
  m(0, 0) = 0.5;
  EXPECT_THROW(TwoPhotonState::from_density(m), DomainError);  // trace
  m(0, 0) = 1.5;
  m(3, 3) = -0.5;
  EXPECT_THROW(TwoPhotonState::from_density(m), DomainError);  // PSD
  m = Matrix4::Identity() / 4.0;
  m(0, 1) = 0.1;
  EXPECT_THROW(TwoPhotonState::from_density(m), DomainError);  // Hermitian
}

TEST(ApplyLocal, PhaseGivesEq5Coherences) {
  const double dphi = 0.7;
  const Matrix4& m = eq5(dphi).matrix();
  EXPECT_NEAR(std::abs(m(3, 0) - 0.5 * std::polar(1.0, dphi)), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(m(0, 3) - 0.5 * std::polar(1.0, -dphi)), 0.0, 1e-15);
}

TEST(ApplyLocal, IdentityLeavesStateUnchanged) {
  std::mt19937_64 rng(3);
  const auto s = testutil::random_state(rng);
  const auto r = apply_local(s, PolarizationOperator::identity(), PolarizationOperator::identity());
  ASSERT_TRUE(r.state);
  EXPECT_DOUBLE_EQ(r.probability, 1.0);
  EXPECT_LT(TwoPhotonState::distance(*r.state, s), 1e-15);
}

TEST(ApplyLocal, OrthogonalProjectionBlocks) {
  const auto hh = TwoPhotonState::from_pure(Vector4(1, 0, 0, 0));
  const auto r = apply_local(hh, pbs_projector(Port::transmitted), PolarizationOperator::identity());
  EXPECT_FALSE(r.state);
  EXPECT_NEAR(r.probability, 0.0, 1e-15);
}

TEST(ApplyLocal, ProjectionRenormalizes) {
  const auto r = apply_local(bell(), pbs_projector(Port::reflected), PolarizationOperator::identity());
  ASSERT_TRUE(r.state);
  EXPECT_NEAR(r.probability, 0.5, 1e-15);
  EXPECT_NEAR(r.state->matrix()(0, 0).real(), 1.0, 1e-15);
}

TEST(Transform, RejectsProjector) {
  EXPECT_THROW(transform(bell(), pbs_projector(Port::reflected), PolarizationOperator::identity()),
               DomainError);
}

TEST(PartialTrace, Examples) {
  const Matrix2 half = Matrix2::Identity() / 2.0;
  EXPECT_LT((partial_trace(bell(), Photon::signal).matrix() - half).cwiseAbs().maxCoeff(), 1e-15);
  const auto hh = TwoPhotonState::from_pure(Vector4(1, 0, 0, 0));
  Matrix2 h = Matrix2::Zero();
  h(0, 0) = 1.0;
  EXPECT_LT((partial_trace(hh, Photon::idler).matrix() - h).cwiseAbs().maxCoeff(), 1e-15);
  for (double dphi = 0.0; dphi < 2 * kPi; dphi += 0.3) {
    EXPECT_LT((partial_trace(eq5(dphi), Photon::signal).matrix() - half).cwiseAbs().maxCoeff(),
              1e-15);
  }
}

TEST(PartialTrace, ProductStateFactors) {
  const auto plus = SinglePhotonState::from_pure(Vector2(s2, s2));
  const auto v = SinglePhotonState::from_pure(Vector2(0, 1));
  const auto p = TwoPhotonState::product(plus, v);
  EXPECT_LT((partial_trace(p, Photon::signal).matrix() - plus.matrix()).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_LT((partial_trace(p, Photon::idler).matrix() - v.matrix()).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(JointProbability, ErasureExamples) {
  const MeasurementSetting t(degrees(22.5), Port::transmitted);
  const MeasurementSetting r(degrees(22.5), Port::reflected);
  EXPECT_NEAR(joint_probability(eq5(0.0), t, t), 0.5, 1e-12);
  EXPECT_NEAR(joint_probability(eq5(kPi), t, r), 0.5, 1e-12);
  for (double dphi = 0.0; dphi < 2 * kPi; dphi += 0.1) {
    const auto s = eq5(dphi);
    EXPECT_NEAR(joint_probability(s, r, r), 0.5 * std::pow(std::cos(dphi / 2), 2), 1e-12);
    EXPECT_NEAR(joint_probability(s, t, t), 0.5 * std::pow(std::cos(dphi / 2), 2), 1e-12);
    EXPECT_NEAR(joint_probability(s, t, r), 0.5 * std::pow(std::sin(dphi / 2), 2), 1e-12);
    // sum rule: the flat no-interference pattern
    EXPECT_NEAR(joint_probability(s, t, t) + joint_probability(s, t, r), 0.5, 1e-12);
  }
}

TEST(JointProbability, WhichWayFlat) {
  for (double dphi = 0.0; dphi < 2 * kPi; dphi += 0.1) {
    const auto s = eq5(dphi);
    for (Port ps : {Port::transmitted, Port::reflected})
      for (Port pi : {Port::transmitted, Port::reflected})
        EXPECT_NEAR(joint_probability(s, MeasurementSetting(degrees(22.5), ps),
                                      MeasurementSetting(0.0, pi)),
                    0.25, 1e-12);
  }
}

TEST(JointProbability, MatchesNaiveOracleOnRandomInputs) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> angle(-kPi, kPi);
  std::bernoulli_distribution coin;
  double worst = 0.0;
  for (int k = 0; k < 100; ++k) {
    const auto s = testutil::random_state(rng);
    const double ts = angle(rng), ti = angle(rng);
    const bool rs = coin(rng), ri = coin(rng);
    const double lib = joint_probability(
        s, MeasurementSetting(ts, rs ? Port::reflected : Port::transmitted),
        MeasurementSetting(ti, ri ? Port::reflected : Port::transmitted));
    const double ref = oracle::joint_probability(testutil::to_oracle(s.matrix()), ts, rs, ti, ri);
    worst = std::max(worst, std::abs(lib - ref));
  }
  EXPECT_LT(worst, 1e-10);
}

TEST(JointProbability, PortCompleteness) {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> angle(0.0, kPi);
  for (int k = 0; k < 100; ++k) {
    const auto s = testutil::random_state(rng);
    const double ts = angle(rng), ti = angle(rng);
    double total = 0.0;
    for (Port ps : {Port::transmitted, Port::reflected})
      for (Port pi : {Port::transmitted, Port::reflected})
        total += joint_probability(s, MeasurementSetting(ts, ps), MeasurementSetting(ti, pi));
    EXPECT_NEAR(total, 1.0, 1e-10);
  }
}

TEST(NoSignaling, IdlerOperationsLeaveSignalUnchanged) {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> angle(0.0, kPi);
  for (int k = 0; k < 100; ++k) {
    const auto s = testutil::random_state(rng);
    const Matrix2 before = partial_trace(s, Photon::signal).matrix();
    // unitary on the idler
    const PolarizationOperator u(testutil::random_unitary(rng), PolarizationOperator::Kind::unitary);
    const auto rotated = transform(s, PolarizationOperator::identity(), u);
    EXPECT_LT((partial_trace(rotated, Photon::signal).matrix() - before).cwiseAbs().maxCoeff(), 1e-10);
    // idler measurement with outcome discarded
    const double th = angle(rng);
    Matrix2 mixed = Matrix2::Zero();
    for (Port p : {Port::transmitted, Port::reflected}) {
      const auto r = apply_local(s, PolarizationOperator::identity(),
                                 analyzer_projector(MeasurementSetting(th, p)));
      if (r.state) mixed += r.probability * partial_trace(*r.state, Photon::signal).matrix();
    }
    EXPECT_LT((mixed - before).cwiseAbs().maxCoeff(), 1e-10);
  }
}

TEST(Invariants, TransformsPreserveDensityProperties) {
  std::mt19937_64 rng(14);
  for (int k = 0; k < 100; ++k) {
    const auto s = testutil::random_state(rng);
    const PolarizationOperator a(testutil::random_unitary(rng), PolarizationOperator::Kind::unitary);
    const PolarizationOperator b(testutil::random_unitary(rng), PolarizationOperator::Kind::unitary);
    const Matrix4 out = transform(s, a, b).matrix();
    EXPECT_TRUE(is_valid_density(out, 1e-10));
    EXPECT_NEAR(std::abs(out.trace() - Complex(1.0, 0.0)), 0.0, 1e-10);
    EXPECT_LT((out - out.adjoint()).cwiseAbs().maxCoeff(), 1e-10);
  }
}

TEST(Dephase, Examples) {
  EXPECT_LT(TwoPhotonState::distance(dephase(bell(), 1.0), bell()), 1e-15);
  Matrix4 mixed = Matrix4::Zero();
  mixed(0, 0) = mixed(3, 3) = 0.5;
  EXPECT_LT(max_abs(dephase(bell(), 0.0).matrix() - mixed), 1e-15);
  EXPECT_THROW(dephase(bell(), 1.5), DomainError);
  EXPECT_THROW(dephase(bell(), -0.1), DomainError);
}

TEST(Dephase, ErasureVisibilityEqualsCoherence) {
  const auto s = dephase(bell(), 0.73);
  const MeasurementSetting r(degrees(22.5), Port::reflected);
  std::vector<double> ys;
  for (int k = 0; k < 200; ++k) {
    const double dphi = 2 * kPi * k / 200.0;
    ys.push_back(joint_probability(
        transform(s, interferometer_phase(dphi), PolarizationOperator::identity()), r, r));
  }
  EXPECT_NEAR(oracle::visibility(ys), 0.73, 1e-12);
}

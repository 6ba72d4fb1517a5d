#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "qfound/analysis.hpp"
#include "qfound/experiments.hpp"
#include "qfound/rng.hpp"

namespace qfound {
namespace {

constexpr double kPi = std::numbers::pi;

double sq(double x) { return x * x; }

// Random positive angles summing to π.
AngleVector random_angles(Rng& rng, int n) {
  std::vector<double> w(static_cast<std::size_t>(n));
  double total = 0.0;
  for (auto& x : w) {
    x = 0.05 + rng.uniform();
    total += x;
  }
  AngleVector a;
  for (double x : w) a.thetas.push_back(kPi * x / total);
  // Absorb rounding into the last angle so the sum is exact to the ulp.
  a.thetas.back() += kPi - a.sum();
  return a;
}

Distribution ideal(const Circuit& c) { return probabilities(simulate_ideal(c)); }

TEST(Eraser, WithoutEraserIsUniform) {
  const Distribution d = ideal(build_eraser(false));
  for (const char* k : {"00", "01", "10", "11"}) EXPECT_NEAR(d[k], 0.25, 1e-12);
}

TEST(Eraser, WithEraserRecoversInterference) {
  const Distribution d = ideal(build_eraser(true));
  EXPECT_NEAR(d["00"], 0.5, 1e-12);
  EXPECT_NEAR(d["01"], 0.0, 1e-12);
  EXPECT_NEAR(d["10"], 0.0, 1e-12);
  EXPECT_NEAR(d["11"], 0.5, 1e-12);
}

TEST(Eraser, ErasedFinalStateIsBell) {
  const StateVector s = simulate_ideal(build_eraser(true));
  EXPECT_NEAR(std::abs(s.amplitude("00") - Complex(std::numbers::sqrt2 / 2, 0)), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(s.amplitude("11") - Complex(std::numbers::sqrt2 / 2, 0)), 0.0, 1e-12);
}

TEST(Eraser, NonErasedAmplitudesCarryOneMinusSign) {
  const StateVector s = simulate_ideal(build_eraser(false));
  EXPECT_NEAR(s.amplitude("00").real(), 0.5, 1e-12);
  EXPECT_NEAR(s.amplitude("01").real(), 0.5, 1e-12);
  EXPECT_NEAR(s.amplitude("10").real(), 0.5, 1e-12);
  EXPECT_NEAR(s.amplitude("11").real(), -0.5, 1e-12);
}

TEST(Eraser, TheoryMatchesSimulation) {
  for (bool erase : {false, true}) {
    EXPECT_LT(tv_distance(ideal(build_eraser(erase)), eraser_theory(erase)), 1e-12);
  }
}

TEST(Bomb, PresentSplitsEvenly) {
  const Distribution d = ideal(build_bomb(true));
  for (const char* k : {"00", "01", "10", "11"}) EXPECT_NEAR(d[k], 0.25, 1e-12);
  EXPECT_NEAR(d["01"] + d["11"], 0.5, 1e-12);  // bomb touched
}

TEST(Bomb, AbsentAlwaysConstructive) {
  const Distribution d = ideal(build_bomb(false));
  EXPECT_NEAR(d["00"], 1.0, 1e-12);
}

TEST(Bomb, EfficiencyIsOneThird) {
  EXPECT_NEAR(eta_from_distribution(ideal(build_bomb(true)), EtaLabeling::kSingleStage), 1.0 / 3.0, 1e-12);
  for (bool present : {false, true}) {
    EXPECT_LT(tv_distance(ideal(build_bomb(present)), bomb_theory(present)), 1e-12);
  }
}

TEST(GeneralBomb, TwoStageReplicatesBombProbabilities) {
  const AngleVector a{{kPi / 2, kPi / 2}};
  EXPECT_LT(tv_distance(ideal(build_general_bomb(a)), ideal(build_bomb(true))), 1e-12);
}

TEST(GeneralBomb, FiveEqualStages) {
  const Distribution d = ideal(build_general_bomb(AngleVector::equal(5)));
  const double c = std::cos(kPi / 10);
  const double s = std::sin(kPi / 10);
  EXPECT_NEAR(d["00000"], std::pow(c, 10), 1e-10);
  EXPECT_NEAR(d["10000"], s * s * std::pow(c, 8), 1e-10);
}

TEST(GeneralBomb, AllZeroIsCosineProduct) {
  const AngleVector a{{kPi / 4, kPi / 4, kPi / 2}};
  double prod = 1.0;
  for (double t : a.thetas) prod *= sq(std::cos(t / 2));
  EXPECT_NEAR(ideal(build_general_bomb(a))["000"], prod, 1e-10);
}

TEST(GeneralBomb, GateOrdering) {
  const Circuit c = build_general_bomb(AngleVector{{1.0, 1.0, kPi - 2.0}});
  ASSERT_EQ(c.num_qubits(), 3);
  std::vector<GateKind> kinds;
  for (const auto& inst : c.instructions()) {
    if (inst.kind == InstructionKind::kGate) kinds.push_back(inst.gate->kind());
  }
  const std::vector<GateKind> expected{GateKind::kRy, GateKind::kCnot, GateKind::kRy, GateKind::kCnot, GateKind::kRy};
  EXPECT_EQ(kinds, expected);
  EXPECT_EQ(c.measured_qubits(), (std::vector<int>{0, 1, 2}));
}

TEST(GeneralBomb, RejectsBadAngleSum) {
  EXPECT_THROW(build_general_bomb(AngleVector{{1.0, 1.0}}), ExperimentError);
  EXPECT_THROW(build_general_bomb(AngleVector{{kPi}}), ExperimentError);
  EXPECT_THROW(build_general_bomb(AngleVector{{kPi / 2, kPi / 2 + 2e-9}}), ExperimentError);
  EXPECT_NO_THROW(build_general_bomb(AngleVector{{kPi / 2, kPi / 2 + 5e-10}}));
  EXPECT_THROW(AngleVector({{NAN, kPi}}).validate(), ExperimentError);
}

TEST(GeneralBomb, CircuitMatchesClosedFormOnRandomAngles) {
  Rng rng(99);
  for (int i = 0; i < 100; ++i) {
    const int n = 2 + static_cast<int>(rng.below(5));
    const AngleVector a = random_angles(rng, n);
    const double eta = eta_from_distribution(ideal(build_general_bomb(a)), EtaLabeling::kMultiStage);
    ASSERT_NEAR(eta, eta_general(a), 1e-9) << "n=" << n;
  }
}

TEST(GeneralBomb, EqualAnglesMatchEqualFormula) {
  for (int n = 2; n <= 6; ++n) {
    const AngleVector a = AngleVector::equal(n);
    EXPECT_NEAR(eta_general(a), eta_equal_bs(n), 1e-12);
    EXPECT_NEAR(eta_from_distribution(ideal(build_general_bomb(a)), EtaLabeling::kMultiStage), eta_equal_bs(n), 1e-12);
  }
}

TEST(GeneralBomb, SweepPoint) {
  const AngleVector a = AngleVector::sweep_point(4, 0.4 * kPi);
  ASSERT_EQ(a.size(), 4);
  EXPECT_NEAR(a.thetas[0], 0.2 * kPi, 1e-15);
  EXPECT_NEAR(a.thetas[3], 0.4 * kPi, 1e-15);
  EXPECT_NEAR(a.sum(), kPi, 1e-12);
}

TEST(EtaEqual, KnownValues) {
  EXPECT_NEAR(eta_equal_bs(2), 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(eta_equal_bs(10), 0.796, 5e-4);
  EXPECT_GT(eta_equal_bs(100), 0.97);
  EXPECT_THROW(eta_equal_bs(1), ExperimentError);
}

TEST(EtaEqual, MonotoneInN) {
  for (int n = 2; n < 200; ++n) EXPECT_LT(eta_equal_bs(n), eta_equal_bs(n + 1)) << n;
}

TEST(EtaGeneral, ThreeStageSweepValues) {
  auto eta3 = [](double t) { return eta_general(AngleVector::sweep_point(3, t * kPi)); };
  EXPECT_NEAR(eta3(0.6), 0.6084924376794022, 1e-12);
  // Ideal curve crosses 0.64 only at θ ≈ 0.725π.
  EXPECT_LT(eta3(0.72), 0.64);
  EXPECT_GT(eta3(0.73), 0.64);
  for (double t = 0.05; t < 0.95; t += 0.01) EXPECT_LT(eta3(t), eta3(t + 0.01));
  EXPECT_THROW(eta_general(AngleVector{{1.0, 1.0}}), ExperimentError);
}

TEST(Hardy, ZeroAnglesGiveOneOneZero) {
  const StateVector s = simulate_ideal(build_hardy(0.0, 0.0));
  EXPECT_NEAR(std::abs(s.amplitude("110")), 1.0, 1e-12);
}

TEST(Hardy, HalfPiAllZeroAmplitude) {
  const StateVector s = simulate_ideal(build_hardy(kPi / 2, kPi / 2));
  EXPECT_NEAR(s.amplitude("000").real(), -0.25, 1e-12);
  EXPECT_NEAR(hardy_amplitudes(kPi / 2, kPi / 2)[0], -0.25, 1e-15);
}

TEST(Hardy, RejectsOutOfRangeAngles) {
  EXPECT_THROW(build_hardy(-0.1, 1.0), ExperimentError);
  EXPECT_THROW(build_hardy(1.0, kPi + 1e-6), ExperimentError);
  EXPECT_NO_THROW(build_hardy(0.0, kPi));
}

TEST(Hardy, AmplitudesMatchClosedFormOnGrid) {
  for (int i = 0; i < 50; ++i) {
    for (int j = 0; j < 50; ++j) {
      const double t0 = kPi * (i + 0.5) / 50;
      const double t1 = kPi * (j + 0.5) / 50;
      const StateVector s = simulate_ideal(build_hardy(t0, t1));
      const auto expected = hardy_amplitudes(t0, t1);
      for (std::size_t k = 0; k < 8; ++k) {
        ASSERT_NEAR(std::abs(s[k] - Complex(expected[k], 0.0)), 0.0, 1e-10) << t0 << " " << t1 << " " << k;
      }
      ASSERT_NEAR(s.amplitude("111").real(), sq(std::sin(t1 / 2)) * sq(std::sin(t0 / 2)), 1e-10);
    }
  }
}

TEST(Hardy, PostSelectedGammaMatchesClosedFormOnGrid) {
  for (int i = 0; i < 50; ++i) {
    for (int j = 0; j < 50; ++j) {
      const double t0 = kPi * (i + 0.5) / 50;
      const double t1 = kPi * (j + 0.5) / 50;
      const Distribution d = ideal(build_hardy(t0, t1));
      ASSERT_NEAR(gamma_from_distribution(d), gamma_closed(t0, t1), 1e-9);
      double kept = 0.0;
      for (std::uint64_t k = 0; k < 8; ++k) {
        if ((k & 1u) == 0) kept += d.at(k);
      }
      double renorm = 0.0;
      for (std::uint64_t k = 0; k < 8; ++k) {
        if ((k & 1u) == 0) renorm += d.at(k) / kept;
      }
      ASSERT_NEAR(renorm, 1.0, 1e-12);
    }
  }
}

TEST(Gamma, DiagonalMatchesEqualForm) {
  for (int k = 1; k < 100; ++k) {
    const double t = kPi * k / 100;
    EXPECT_NEAR(gamma_closed(t, t), gamma_equal(t), 1e-12);
  }
}

TEST(Gamma, KnownValues) {
  const double gmax = 0.5 * (5 * std::sqrt(5.0) - 11);
  EXPECT_NEAR(gamma_closed(0.575 * kPi, 0.575 * kPi), gmax, 1e-5);
  EXPECT_NEAR(gamma_equal(kPi / 2), 1.0 / 12.0, 1e-15);
  EXPECT_NEAR(gamma_closed(0.0, 0.0), 0.0, 1e-15);
  EXPECT_NEAR(gamma_closed(kPi, kPi), 0.0, 1e-15);
}

TEST(AlphaBeta, Limits) {
  EXPECT_NEAR(gamma_from_alpha_beta(0.4, 0.4), 0.0, 1e-15);
  EXPECT_NEAR(gamma_from_alpha_beta(0.7, 0.0), 0.0, 1e-15);
  EXPECT_THROW(gamma_from_alpha_beta(1.0, 1.0), ExperimentError);
  EXPECT_THROW(gamma_from_alpha_beta(2.0, -0.6), ExperimentError);
}

TEST(AlphaBeta, SubstitutionAtMaximum) {
  const auto [alpha, beta] = alpha_beta_from_theta(0.575 * kPi);
  EXPECT_NEAR(gamma_from_alpha_beta(alpha, beta), gamma_equal(0.575 * kPi), 1e-9);
  EXPECT_NEAR(gamma_from_alpha_beta(alpha, beta), 0.0902, 1e-4);
}

TEST(AlphaBeta, ConsistentWithClosedForm) {
  Rng rng(7);
  for (int i = 0; i < 100; ++i) {
    const double t = kPi * (0.01 + 0.98 * rng.uniform());
    const auto [alpha, beta] = alpha_beta_from_theta(t);
    const double s = alpha * beta / (1 - alpha * beta);
    ASSERT_NEAR(std::sqrt(s), std::sin(t / 2), 1e-12);
    ASSERT_NEAR(gamma_from_alpha_beta(alpha, beta), gamma_equal(t), 1e-9) << t;
  }
}

TEST(ExperimentSpec, BuildDispatches) {
  ExperimentSpec spec;
  spec.kind = ExperimentKind::kHardy;
  spec.theta0 = 1.0;
  spec.theta1 = 2.0;
  EXPECT_EQ(build(spec), build_hardy(1.0, 2.0));
  EXPECT_EQ(spec.num_qubits(), 3);
  spec.kind = ExperimentKind::kGeneralBomb;
  spec.angles = AngleVector::equal(4);
  EXPECT_EQ(spec.num_qubits(), 4);
  spec.angles = AngleVector{{1.0}};
  EXPECT_THROW(spec.validate(), ExperimentError);
}

TEST(ExperimentSpec, KindNames) {
  for (auto k : {ExperimentKind::kEraser, ExperimentKind::kBomb, ExperimentKind::kGeneralBomb, ExperimentKind::kHardy}) {
    EXPECT_EQ(experiment_kind_from_name(kind_name(k)), k);
  }
  EXPECT_THROW(experiment_kind_from_name("teleport"), ExperimentError);
}

}  // namespace
}  // namespace qfound

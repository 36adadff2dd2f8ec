#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "levyspde/conditions.hpp"
#include "levyspde/errors.hpp"

namespace levyspde {
namespace {

using Eigen::VectorXd;
constexpr double pi = std::numbers::pi;

Discretization interval(int n) { return build_discretization(DomainKind::interval_dirichlet, n); }

OperatorSuite heat(const Discretization& disc, NoiseMaps noise) {
  return burgers_suite(disc, {}, {}, std::move(noise));
}

LevyNoiseSpec atoms_spec(VectorXd wiener = VectorXd()) {
  std::vector<SmallAtom> atoms = {{VectorXd{{0.2}}, 4.0}, {VectorXd{{-0.5}}, 2.0}, {VectorXd{{0.9}}, 1.0}};
  return LevyNoiseSpec(1, std::move(wiener), std::move(atoms), 0.0, {});
}

SamplingSpec sampling(std::uint64_t seed, double radius = 1.0, bool probes = false) {
  SamplingSpec s;
  s.seed = seed;
  s.radius = radius;
  s.probes = probes;
  return s;
}

TEST(Report, AccountingMatchesMargins) {
  ConditionReport r;
  r.record(1.0, 2.0);                  // margin 1
  r.record(3.0, 3.0 - 1e-12);          // inside tolerance
  r.record(5.0, 4.0);                  // margin −1
  r.record_margin(-1e-3, 1.0);
  EXPECT_EQ(r.samples_evaluated, 4);
  EXPECT_EQ(r.violations, 2);
  EXPECT_EQ(r.min_margin, -1.0);
  ASSERT_EQ(r.margins.size(), 4u);
  int count = 0;
  for (double m : r.margins) count += m < -1e-8 * 10.0 ? 1 : 0;
  EXPECT_EQ(count, 2);
}

TEST(Hemicontinuity, LinearDriftHasNoJump) {
  const auto disc = interval(8);
  const auto r = check_hemicontinuity(heat(disc, zero_noise_maps(disc)), disc, 20, 17, sampling(1));
  EXPECT_EQ(r.violations, 0);
  EXPECT_GE(r.min_margin, 0.0);
  EXPECT_EQ(r.samples_evaluated, 20);
}

TEST(Hemicontinuity, BurgersMapIsQuadraticInS) {
  const auto disc = interval(16);
  const auto suite = burgers_suite(disc, [](double x) { return x; }, {}, zero_noise_maps(disc));
  const auto smp = sampling(2, 3.0);
  const VectorXd v1 = sample_state(disc, smp, 0), v2 = sample_state(disc, smp, 1), v = sample_state(disc, smp, 2);
  std::vector<double> phi;
  for (int j = 0; j <= 16; ++j) phi.push_back(suite.drift(0.0, v1 + (-1.0 + j / 8.0) * v2).dot(v));
  double scale = 0.0;
  for (double x : phi) scale = std::max(scale, std::abs(x));
  for (std::size_t j = 0; j + 3 < phi.size(); ++j) {
    const double third = phi[j + 3] - 3 * phi[j + 2] + 3 * phi[j + 1] - phi[j];
    EXPECT_LE(std::abs(third), 1e-8 * scale);
  }
  const auto r = check_hemicontinuity(suite, disc, 20, 17, smp);
  EXPECT_EQ(r.violations, 0);
}

TEST(Hemicontinuity, PLaplaceHasNoJump) {
  const auto disc = interval(16);
  const auto suite = p_laplace_suite(disc, 3.0, {}, zero_noise_maps(disc));
  const auto r = check_hemicontinuity(suite, disc, 100, 17, sampling(3));
  EXPECT_EQ(r.violations, 0);
}

TEST(Hemicontinuity, DetectsStepDiscontinuity) {
  const auto disc = interval(8);
  OperatorSuite step;
  step.name = "step";
  step.disc_id = disc.id();
  step.linear_part = VectorXd::Zero(8);
  step.nonlinear_part = [](double, const VectorXd& v) -> VectorXd {
    return (v(0) > 0.0 ? 10.0 : 0.0) * VectorXd::Unit(v.size(), 0);
  };
  step.noise = zero_noise_maps(disc);
  const auto smp = sampling(4);
  const int triples = 40;
  const auto r = check_hemicontinuity(step, disc, triples, 17, smp);
  int crossings = 0;
  for (int i = 0; i < triples; ++i) {
    const VectorXd v1 = sample_state(disc, smp, 3 * i), v2 = sample_state(disc, smp, 3 * i + 1);
    const VectorXd v = sample_state(disc, smp, 3 * i + 2);
    // φ(s) jumps by 10·v(0) where v1(0) + s·v2(0) changes sign.
    const double s_star = -v1(0) / v2(0);
    const double expected = std::abs(s_star) < 1.0 ? 10.0 * std::abs(v(0)) : 0.0;
    crossings += expected > 0.0 ? 1 : 0;
    EXPECT_NEAR(r.margins[i], -expected, 1e-12) << "triple " << i;
  }
  EXPECT_GT(crossings, 0);
  EXPECT_EQ(r.violations, crossings);
}

TEST(Hemicontinuity, NeedsThreePoints) {
  const auto disc = interval(4);
  EXPECT_THROW(check_hemicontinuity(heat(disc, zero_noise_maps(disc)), disc, 1, 2, sampling(0)),
               ParameterError);
}

TEST(LocalMonotonicity, HeatWithLipschitzNoiseMatchesClosedForm) {
  const auto disc = interval(8);
  const auto spec = atoms_spec(VectorXd{{0.1, 0.2}});
  auto suite = heat(disc, lipschitz_noise_maps(disc, spec, 0.5, 0.3, JumpProfile::min_norm, {}, 4.0));
  suite.constants.rho = {};
  const double L = suite.noise.lipschitz_constant();
  const auto smp = sampling(5, 2.0);
  const auto r = check_local_monotonicity(suite, disc, 100, smp, L);
  EXPECT_EQ(r.violations, 0);
  ASSERT_TRUE(r.calibrated_constant.has_value());
  EXPECT_LE(*r.calibrated_constant, L);
  // With C = L the margin is 2‖v₁ − v₂‖²_V.
  for (int i = 0; i < 100; ++i) {
    const VectorXd d = sample_state(disc, smp, 2 * i) - sample_state(disc, smp, 2 * i + 1);
    double v_sq = 0.0;
    for (int k = 1; k <= 8; ++k) v_sq += (k * pi) * (k * pi) * d(k - 1) * d(k - 1);
    EXPECT_NEAR(r.margins[i], 2.0 * v_sq, 1e-10 * (1.0 + v_sq));
  }
}

TEST(LocalMonotonicity, RhoEntersOnlyThroughSecondState) {
  const auto disc = interval(16);
  auto suite = burgers_suite(disc, [](double x) { return x; }, {}, zero_noise_maps(disc));
  const auto smp = sampling(6, 2.0);
  suite.constants.rho = {};
  const auto plain = check_local_monotonicity(suite, disc, 50, smp, 1.0);
  suite.constants.rho = RhoForm{RhoForm::Kind::v_norm_sq, 0.7, 2.0, 2.0};
  const auto with_rho = check_local_monotonicity(suite, disc, 50, smp, 1.0);
  for (int i = 0; i < 50; ++i) {
    const VectorXd v1 = sample_state(disc, smp, 2 * i), v2 = sample_state(disc, smp, 2 * i + 1);
    const double extra = 0.7 * std::pow(disc.v_norm(v2), 2) * (v1 - v2).squaredNorm();
    EXPECT_NEAR(with_rho.margins[i] - plain.margins[i], extra, 1e-9 * (1.0 + extra));
  }
}

TEST(LocalMonotonicity, CalibrationMonotoneInSampleSet) {
  const auto disc = interval(16);
  const auto suite = burgers_suite(disc, [](double x) { return x; }, {}, zero_noise_maps(disc));
  const auto smp = sampling(7, 2.0, true);
  double last = -1e300;
  std::vector<double> prev;
  for (int n : {10, 40, 160}) {
    const auto r = check_local_monotonicity(suite, disc, n, smp, 0.0);
    ASSERT_TRUE(r.calibrated_constant.has_value());
    EXPECT_GE(*r.calibrated_constant, last);
    last = *r.calibrated_constant;
    for (std::size_t i = 0; i < prev.size(); ++i) EXPECT_EQ(r.margins[i], prev[i]);
    prev = r.margins;
  }
}

TEST(LocalMonotonicity, CalibratedConstantClearsSamplesAndIsStable) {
  double C[2];
  const int levels[2] = {16, 32};
  for (int l = 0; l < 2; ++l) {
    const auto disc = interval(levels[l]);
    const auto suite = burgers_suite(disc, [](double x) { return x; }, {}, zero_noise_maps(disc));
    const auto train = check_local_monotonicity(suite, disc, 200, sampling(8, 1.0, true), 0.0);
    ASSERT_TRUE(train.calibrated_constant.has_value());
    C[l] = *train.calibrated_constant;
    const auto again = check_local_monotonicity(suite, disc, 200, sampling(8, 1.0, true), C[l]);
    EXPECT_EQ(again.violations, 0);
  }
  EXPECT_LE(std::abs(C[1]), 2.0 * std::abs(C[0]) + 1e-9);
  EXPECT_LE(std::abs(C[0]), 2.0 * std::abs(C[1]) + 1e-9);
}

TEST(Coercivity, PureHeatIsExactEquality) {
  const auto disc = interval(16);
  auto suite = heat(disc, zero_noise_maps(disc));
  suite.constants.theta = 2.0;
  suite.constants.C = 0.0;
  suite.constants.F = {};
  const auto r = check_coercivity(suite, disc, 200, sampling(9, 5.0));
  EXPECT_EQ(r.violations, 0);
  for (double m : r.margins) EXPECT_LE(std::abs(m), 1e-10);
}

TEST(Coercivity, NavierStokesReducesToStokes) {
  const auto disc = build_discretization(DomainKind::torus2d, 6, 2);
  const VectorXd forcing = profile_coefficients(disc, "shear", 0.5, 2);
  auto ns = ns2d_suite(disc, 0.5, forcing, zero_noise_maps(disc));
  auto stokes = ns;
  stokes.nonlinear_part = [forcing](double, const VectorXd&) { return forcing; };
  const auto smp = sampling(10, 2.0);
  const auto a = check_coercivity(ns, disc, 50, smp);
  const auto b = check_coercivity(stokes, disc, 50, smp);
  EXPECT_EQ(a.violations, 0);
  for (int i = 0; i < 50; ++i) EXPECT_NEAR(a.margins[i], b.margins[i], 1e-8 * (1.0 + std::abs(b.margins[i])));
}

TEST(Growth, LaplacianIsSelfDual) {
  const auto disc = interval(16);
  auto suite = heat(disc, zero_noise_maps(disc));
  suite.constants.beta = 0.0;
  suite.constants.C = 1.0;
  suite.constants.F = {};
  const auto smp = sampling(11, 3.0);
  const auto r = check_growth(suite, disc, 100, smp);
  EXPECT_EQ(r.violations, 0);
  // ‖Δv‖_{V*} = ‖v‖_V, so with β = 0 the margin is 2‖v‖²_V − ‖v‖²_V.
  for (int i = 0; i < 100; ++i) {
    const double v_sq = std::pow(disc.v_norm(sample_state(disc, smp, i)), 2);
    EXPECT_NEAR(r.margins[i], v_sq, 1e-9 * (1.0 + v_sq));
  }
  EXPECT_NEAR(*r.calibrated_constant, 0.5, 1e-10);
}

TEST(DualNorm, IterativeSolverAgreesWithClosedFormNearTwo) {
  const auto disc = interval(8);
  for (std::uint64_t s = 0; s < 5; ++s) {
    const VectorXd w = sample_state(disc, sampling(12 + s), 0);
    const double exact = disc.dual_norm_v2(w);
    EXPECT_NEAR(dual_norm(disc, w, 2.0 + 1e-9), exact, 1e-6 * exact);
  }
}

TEST(DualNorm, HomogeneousAndBoundsPairings) {
  const auto disc = interval(8);
  const VectorXd w = sample_state(disc, sampling(20), 0);
  const double d = dual_norm(disc, w, 3.0);
  EXPECT_NEAR(dual_norm(disc, 2.5 * w, 3.0), 2.5 * d, 1e-6 * d);
  EXPECT_EQ(dual_norm(disc, VectorXd::Zero(8), 3.0), 0.0);
  // No sampled direction beats the optimum by more than the solver tolerance.
  for (int i = 0; i < 50; ++i) {
    const VectorXd v = sample_state(disc, sampling(21), i);
    EXPECT_LE(std::abs(w.dot(v)) / disc.v_norm(v, 3.0), d * (1.0 + 1e-4));
  }
}

TEST(NoiseConditions, NoNoiseMarginsAreF) {
  const auto disc = interval(8);
  auto suite = heat(disc, zero_noise_maps(disc));
  suite.constants.C = 0.0;
  suite.constants.F.constant = 0.7;
  const auto spec = atoms_spec();
  const auto r = check_noise_conditions(suite, spec, disc, 30, sampling(13));
  for (double m : r[0].margins) EXPECT_NEAR(m, 0.7, 1e-15);
  for (double m : r[1].margins) EXPECT_NEAR(m, std::pow(0.7, 3.0), 1e-15);
}

TEST(NoiseConditions, MultiplicativeJumpClosedForm) {
  const auto disc = interval(8);
  const auto spec = atoms_spec();
  const double fs = 0.3;
  auto suite = heat(disc, lipschitz_noise_maps(disc, spec, 0.0, fs, JumpProfile::min_norm, {}, 4.0));
  suite.constants.C = 2.0;
  suite.constants.F.constant = 0.1;
  const auto smp = sampling(14, 2.0);
  const auto r = check_noise_conditions(suite, spec, disc, 50, smp);
  double sum_h6 = 0.0;
  for (const auto& a : spec.small_atoms()) sum_h6 += a.weight * std::pow(std::min(a.mark.norm(), 1.0), 6);
  for (int i = 0; i < 50; ++i) {
    const double h = sample_state(disc, smp, i).norm();
    const double lhs = sum_h6 * std::pow(fs * h, 6);
    const double expect = std::pow(0.1, 3) + 2.0 * std::pow(h, 6) - lhs;
    EXPECT_NEAR(r[1].margins[i], expect, 1e-10);
  }
}

TEST(NoiseConditions, RhoGrowthHoldsWhenCoefficientBelowC) {
  const auto disc = interval(8);
  auto suite = heat(disc, zero_noise_maps(disc));
  suite.constants.C = 1.5;
  suite.constants.rho = RhoForm{RhoForm::Kind::v_norm_sq, 1.5, 2.0, 2.0};
  const auto r = check_noise_conditions(suite, atoms_spec(), disc, 100, sampling(15, 4.0));
  EXPECT_EQ(r[2].violations, 0);
  for (double m : r[2].margins) EXPECT_GE(m, 0.0);
}

TEST(NoiseConditions, GammaGateRejected) {
  const auto disc = interval(8);
  auto suite = heat(disc, zero_noise_maps(disc));
  suite.constants.theta = 2.0;
  suite.constants.gamma = 1.0;
  EXPECT_THROW(check_noise_conditions(suite, atoms_spec(), disc, 10, sampling(0)), ConfigError);
}

TEST(Conditions, WrongDiscretizationRejected) {
  const auto disc = interval(8);
  const auto other = interval(9);
  const auto suite = heat(disc, zero_noise_maps(disc));
  EXPECT_THROW(check_coercivity(suite, other, 5, sampling(0)), DimensionError);
  EXPECT_THROW(check_local_monotonicity(suite, other, 5, sampling(0), 0.0), DimensionError);
}

TEST(Conditions, ReproducibleUnderSeed) {
  const auto disc = interval(16);
  const auto suite = burgers_suite(disc, [](double x) { return x; }, {}, zero_noise_maps(disc));
  const auto a = check_growth(suite, disc, 30, sampling(16));
  const auto b = check_growth(suite, disc, 30, sampling(16));
  EXPECT_EQ(a.margins, b.margins);
  const auto c = check_growth(suite, disc, 30, sampling(17));
  EXPECT_NE(a.margins, c.margins);
}

TEST(PLaplaceModulus, MatchesAnalyticInfimum) {
  // inf (|x|x − |y|y)(x − y)/|x − y|³ = 2^{2−p} = 1/2 at p = 3, attained at x = −y.
  EXPECT_DOUBLE_EQ(p_laplace_delta_estimate(3.0, 1000, 1), 0.5);
  EXPECT_NEAR(p_laplace_delta_estimate(4.0, 1000, 1), 0.25, 1e-15);
  EXPECT_THROW(p_laplace_delta_estimate(1.5, 10, 1), ParameterError);
}

}  // namespace
}  // namespace levyspde

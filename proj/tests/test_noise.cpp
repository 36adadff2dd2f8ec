#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "levyspde/errors.hpp"
#include "levyspde/noise.hpp"

namespace levyspde {
namespace {

using Eigen::VectorXd;

LevyNoiseSpec three_atoms(double rate = 0.0) {
  std::vector<SmallAtom> atoms = {{VectorXd{{0.2}}, 4.0}, {VectorXd{{-0.5}}, 2.0}, {VectorXd{{0.9}}, 1.0}};
  return LevyNoiseSpec(1, VectorXd{{0.1, 0.2, 0.3}}, std::move(atoms), rate, {});
}

struct Moments {
  double mean = 0.0;
  double var = 0.0;
  double se = 0.0;
};

Moments moments(const std::vector<double>& x) {
  Moments m;
  const double n = static_cast<double>(x.size());
  m.mean = std::accumulate(x.begin(), x.end(), 0.0) / n;
  for (double v : x) m.var += (v - m.mean) * (v - m.mean);
  m.var /= n - 1.0;
  m.se = std::sqrt(m.var / n);
  return m;
}

TEST(Spec, InvariantsEnforced) {
  EXPECT_THROW(LevyNoiseSpec(1, VectorXd(), {{VectorXd{{0.5}}, 0.0}}, 0.0, {}), ConfigError);
  EXPECT_THROW(LevyNoiseSpec(1, VectorXd(), {{VectorXd{{1.5}}, 1.0}}, 0.0, {}), ConfigError);
  EXPECT_THROW(LevyNoiseSpec(1, VectorXd(), {}, -1.0, {}), ConfigError);
  EXPECT_THROW(LevyNoiseSpec(1, VectorXd(), {}, 1.0, {LargeMarkLaw::Kind::fixed_radius, 0.8}),
               ConfigError);
  EXPECT_THROW(LevyNoiseSpec(2, VectorXd(), {{VectorXd{{0.5}}, 1.0}}, 0.0, {}), ConfigError);
}

TEST(Spec, SmallSecondMoment) {
  EXPECT_NEAR(three_atoms().small_second_moment(), 4 * 0.04 + 2 * 0.25 + 0.81, 1e-15);
}

TEST(Wiener, RejectsNonPositiveDt) {
  Rng rng = make_stream(1, 0, Stream::step_noise);
  EXPECT_THROW(sample_wiener_increments(three_atoms(), 0.0, rng), ParameterError);
}

TEST(Wiener, DeterministicGivenSeed) {
  Rng a = make_stream(5, 2, Stream::step_noise);
  Rng b = make_stream(5, 2, Stream::step_noise);
  EXPECT_EQ(sample_wiener_increments(three_atoms(), 0.01, a),
            sample_wiener_increments(three_atoms(), 0.01, b));
}

TEST(Wiener, VarianceIsDt) {
  const auto spec = three_atoms();
  Rng rng = make_stream(9, 0, Stream::step_noise);
  const int draws = 100000;
  std::vector<std::vector<double>> sq(3), val(3);
  for (int i = 0; i < draws; ++i) {
    const VectorXd w = sample_wiener_increments(spec, 0.01, rng);
    for (int k = 0; k < 3; ++k) {
      sq[k].push_back(w(k) * w(k));
      val[k].push_back(w(k));
    }
  }
  for (int k = 0; k < 3; ++k) {
    const Moments m2 = moments(sq[k]);
    EXPECT_LE(std::abs(m2.mean - 0.01), 3.0 * m2.se) << "mode " << k;
    const Moments m1 = moments(val[k]);
    EXPECT_LE(std::abs(m1.mean), 3.0 * m1.se) << "mode " << k;
  }
}

TEST(LargeJumps, ZeroRateIsEmpty) {
  Rng rng = make_stream(1, 0, Stream::large_jumps);
  for (int i = 0; i < 100; ++i) EXPECT_TRUE(sample_large_jump_times(three_atoms(0.0), 5.0, rng).empty());
}

TEST(LargeJumps, PoissonMeanCount) {
  const auto spec = three_atoms(2.0);
  Rng rng = make_stream(2, 0, Stream::large_jumps);
  std::vector<double> counts;
  for (int i = 0; i < 10000; ++i) {
    const auto ev = sample_large_jump_times(spec, 5.0, rng);
    counts.push_back(static_cast<double>(ev.size()));
    for (std::size_t j = 0; j < ev.size(); ++j) {
      ASSERT_GT(ev[j].time, 0.0);
      ASSERT_LE(ev[j].time, 5.0);
      ASSERT_GT(ev[j].mark.norm(), 1.0);
      ASSERT_EQ(ev[j].kind, JumpEvent::Kind::large);
      if (j > 0) ASSERT_GT(ev[j].time, ev[j - 1].time);
    }
  }
  const Moments m = moments(counts);
  EXPECT_LE(std::abs(m.mean - 10.0), 3.0 * m.se);
}

TEST(LargeJumps, ExponentialGaps) {
  const auto spec = three_atoms(1.0);
  Rng rng = make_stream(3, 0, Stream::large_jumps);
  // Only the first two gaps: later ones are biased by truncation at the horizon,
  // while these are cut off with probability below e^{-40}.
  std::vector<double> gaps;
  for (int i = 0; i < 20000; ++i) {
    const auto ev = sample_large_jump_times(spec, 50.0, rng);
    ASSERT_GE(ev.size(), 2u);
    gaps.push_back(ev[0].time);
    gaps.push_back(ev[1].time - ev[0].time);
  }
  const Moments m = moments(gaps);
  EXPECT_LE(std::abs(m.mean - 1.0), 3.0 * m.se);
}

TEST(LargeJumps, ParetoRadiusLaw) {
  LevyNoiseSpec spec(2, VectorXd(), {}, 3.0, {LargeMarkLaw::Kind::pareto, 2.5});
  Rng rng = make_stream(4, 0, Stream::large_jumps);
  std::vector<double> logs;
  for (int i = 0; i < 3000; ++i) {
    for (const auto& e : sample_large_jump_times(spec, 2.0, rng)) logs.push_back(std::log(e.mark.norm()));
  }
  // log‖z‖ is exponential with rate a under P(‖z‖ > r) = r^{-a}.
  const Moments m = moments(logs);
  EXPECT_LE(std::abs(m.mean - 1.0 / 2.5), 3.0 * m.se);
}

TEST(LargeJumps, DisjointWindowsIndependent) {
  const auto spec = three_atoms(1.5);
  Rng rng = make_stream(5, 0, Stream::large_jumps);
  constexpr int cats = 4;  // counts 0, 1, 2, >= 3
  double table[cats][cats] = {};
  const int reps = 20000;
  for (int i = 0; i < reps; ++i) {
    int a = 0, b = 0;
    for (const auto& e : sample_large_jump_times(spec, 2.0, rng)) (e.time <= 1.0 ? a : b)++;
    table[std::min(a, cats - 1)][std::min(b, cats - 1)] += 1.0;
  }
  double row[cats] = {}, col[cats] = {};
  for (int i = 0; i < cats; ++i) {
    for (int j = 0; j < cats; ++j) {
      row[i] += table[i][j];
      col[j] += table[i][j];
    }
  }
  double chi2 = 0.0;
  for (int i = 0; i < cats; ++i) {
    for (int j = 0; j < cats; ++j) {
      const double expected = row[i] * col[j] / reps;
      chi2 += (table[i][j] - expected) * (table[i][j] - expected) / expected;
    }
  }
  EXPECT_LT(chi2, 21.666);  // χ²₉ upper 1% point
}

TEST(SmallJumps, RejectsNonPositiveDt) {
  Rng rng = make_stream(1, 0, Stream::step_noise);
  EXPECT_THROW(sample_small_jump_counts(three_atoms(), -1.0, rng), ParameterError);
}

TEST(SmallJumps, ArrivalFrequency) {
  LevyNoiseSpec spec(1, VectorXd(), {{VectorXd{{0.5}}, 1.0}}, 0.0, {});
  Rng rng = make_stream(6, 0, Stream::step_noise);
  std::vector<double> hit;
  for (int i = 0; i < 200000; ++i) hit.push_back(sample_small_jump_counts(spec, 0.001, rng)[0] >= 1 ? 1.0 : 0.0);
  const Moments m = moments(hit);
  EXPECT_LE(std::abs(m.mean - (1.0 - std::exp(-0.001))), 3.0 * m.se);
}

TEST(SmallJumps, Reproducible) {
  Rng a = make_stream(8, 1, Stream::step_noise);
  Rng b = make_stream(8, 1, Stream::step_noise);
  for (int i = 0; i < 50; ++i) {
    EXPECT_EQ(sample_small_jump_counts(three_atoms(), 0.5, a), sample_small_jump_counts(three_atoms(), 0.5, b));
  }
}

TEST(Compensated, PureCompensator) {
  const auto spec = three_atoms();
  const MarkFunction f = [](const VectorXd& z) { return VectorXd{{z(0), 2.0 * z(0)}}; };
  const std::vector<int> zero(3, 0);
  const VectorXd out = compensated_increment(f, zero, spec, 0.1, 2);
  const double s = 4 * 0.2 + 2 * -0.5 + 0.9;
  EXPECT_NEAR(out(0), -0.1 * s, 1e-15);
  EXPECT_NEAR(out(1), -0.2 * s, 1e-15);
}

TEST(Compensated, SingleAtomConstant) {
  LevyNoiseSpec spec(1, VectorXd(), {{VectorXd{{0.3}}, 2.0}}, 0.0, {});
  const VectorXd c{{1.5, -0.5}};
  const MarkFunction f = [&](const VectorXd&) { return c; };
  for (int k : {0, 1, 4}) {
    const std::vector<int> counts{k};
    const VectorXd expect = (k - 2.0 * 0.05) * c;
    EXPECT_LE((compensated_increment(f, counts, spec, 0.05, 2) - expect).norm(), 1e-15);
  }
}

TEST(Compensated, DimensionMismatch) {
  const auto spec = three_atoms();
  const MarkFunction f = [](const VectorXd&) { return VectorXd::Ones(3); };
  const std::vector<int> counts(3, 0);
  EXPECT_THROW(compensated_increment(f, counts, spec, 0.1, 2), DimensionError);
  const std::vector<int> short_counts(2, 0);
  EXPECT_THROW(compensated_increment(f, short_counts, spec, 0.1, 3), DimensionError);
}

TEST(Compensated, MartingaleMean) {
  const auto spec = three_atoms();
  const MarkFunction f = [](const VectorXd& z) { return VectorXd{{z(0), 1.0 - z(0) * z(0)}}; };
  Rng rng = make_stream(10, 0, Stream::step_noise);
  std::vector<double> c0, c1;
  for (int i = 0; i < 100000; ++i) {
    const auto counts = sample_small_jump_counts(spec, 0.01, rng);
    const VectorXd inc = compensated_increment(f, counts, spec, 0.01, 2);
    c0.push_back(inc(0));
    c1.push_back(inc(1));
  }
  for (const auto* c : {&c0, &c1}) {
    const Moments m = moments(*c);
    EXPECT_LE(std::abs(m.mean), 3.0 * m.se);
  }
}

TEST(Isometry, SingleAtomAnalytic) {
  LevyNoiseSpec spec(1, VectorXd(), {{VectorXd{{0.4}}, 1.0}}, 0.0, {});
  const MarkFunction f = [](const VectorXd&) { return VectorXd{{1.7}}; };
  const IsometryResult r = verify_isometry(spec, f, 1.0, 10, 2000, 1);
  EXPECT_NEAR(r.analytic, 1.7 * 1.7, 1e-14);
}

TEST(Isometry, ZeroIntegrand) {
  const MarkFunction f = [](const VectorXd&) { return VectorXd::Zero(2); };
  const IsometryResult r = verify_isometry(three_atoms(), f, 1.0, 10, 1000, 1);
  EXPECT_EQ(r.analytic, 0.0);
  EXPECT_EQ(r.mc_second_moment, 0.0);
}

TEST(Isometry, ThreeAtomsVectorIntegrand) {
  const MarkFunction f = [](const VectorXd& z) { return VectorXd{{1.0 + z(0), z(0) * z(0), -0.5}}; };
  const auto spec = three_atoms();
  const IsometryResult r = verify_isometry(spec, f, 1.0, 20, 20000, 3);
  double analytic = 0.0;
  for (const auto& a : spec.small_atoms()) analytic += a.weight * f(a.mark).squaredNorm();
  EXPECT_NEAR(r.analytic, analytic, 1e-13);
  EXPECT_LE(std::abs(r.z_score), 3.0);
  EXPECT_LE(r.max_mean_z, 4.0);
}

TEST(Radial, MassAndSecondMomentPreserved) {
  const double a = 1.2, eps = 0.01, scale = 0.5;
  const auto atoms = discretize_radial_density(a, eps, 6, scale, 2);
  EXPECT_EQ(atoms.size(), 6u * 4u);
  double mass = 0.0, second = 0.0;
  for (const auto& at : atoms) {
    ASSERT_LE(at.mark.norm(), 1.0);
    ASSERT_GT(at.mark.norm(), eps);
    mass += at.weight;
    second += at.weight * at.mark.squaredNorm();
  }
  EXPECT_NEAR(mass, scale * (std::pow(eps, -a) - 1.0) / a, 1e-10 * mass);
  EXPECT_NEAR(second, scale * (1.0 - std::pow(eps, 2.0 - a)) / (2.0 - a), 1e-12);
}

TEST(Radial, RejectsBadParameters) {
  EXPECT_THROW(discretize_radial_density(1.0, 0.0, 4, 1.0, 1), ConfigError);
  EXPECT_THROW(discretize_radial_density(2.5, 0.1, 4, 1.0, 1), ConfigError);
  EXPECT_THROW(discretize_radial_density(1.0, 0.1, 0, 1.0, 1), ConfigError);
}

}  // namespace
}  // namespace levyspde

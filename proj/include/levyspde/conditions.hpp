#pragma once

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "levyspde/noise.hpp"
#include "levyspde/operators.hpp"
#include "levyspde/spaces.hpp"

namespace levyspde {

enum class ConditionId { H1, H2, H3, H4, C3, C4, C5 };
std::string to_string(ConditionId id);

/// How test states are drawn: band-limited Gaussian fields with coefficient
/// std k^{-decay}, rescaled to ‖v‖_H = radius·U with U uniform on (0,1].
/// Sample i depends only on (seed, i), so a larger sample set extends a smaller one.
struct SamplingSpec {
  double radius = 1.0;
  double decay = 1.0;
  std::uint64_t seed = 0;
  /// Prepend deterministic probe pairs (v₂ = 0, v₁ along a low mode) to the (H2) sample.
  bool probes = true;

  std::string distribution() const { return "band_limited_gaussian"; }
};

/// A margin is RHS − LHS of an inequality; it "holds" when
/// margin ≥ −rel_tol·(1 + |LHS| + |RHS|).
struct ConditionReport {
  ConditionId condition_id = ConditionId::H1;
  int samples_evaluated = 0;
  double min_margin = 0.0;
  int violations = 0;
  std::optional<double> calibrated_constant;
  SamplingSpec sampling_spec;
  double rel_tol = 1e-8;
  std::vector<double> margins;

  void record(double lhs, double rhs);
  /// For inequalities whose "sides" are not a plain LHS/RHS pair.
  void record_margin(double margin, double scale);
};

/// Sample i of the state distribution.
Eigen::VectorXd sample_state(const Discretization& disc, const SamplingSpec& sampling,
                             std::uint64_t index);

/// ‖w‖_{V*} = sup ⟨w,v⟩ over ‖v‖_V = 1 in the retained basis, with ‖v‖_V the
/// W^{1,p} norm. Closed form for p = 2; for p ≠ 2 the dual problem
/// min ‖v‖_{V,p} s.t. ⟨w,v⟩ = 1 is solved by preconditioned gradient descent.
double dual_norm(const Discretization& disc, const Eigen::VectorXd& w, double p);

/// (H1) on an s-grid over [−1,1], φ(s) = ⟨A(v₁ + s v₂), v⟩. An increment
/// Δ_j = |φ(s_{j+1}) − φ(s_j)| of a continuous φ with piecewise-linear
/// increments never exceeds twice its larger neighbour; the jump estimate is
/// max_j (Δ_j − 2 max(Δ_{j−1}, Δ_{j+1}))₊, the part of an isolated spike that
/// neighbouring increments cannot explain, minimised over the grid and three
/// successive halvings of its spacing.
ConditionReport check_hemicontinuity(const OperatorSuite& suite, const Discretization& disc,
                                     int n_triples, int n_s_points, const SamplingSpec& sampling,
                                     double rel_tol = 1e-8);

/// (H2) with C = c_guess. calibrated_constant is max over pairs of
/// (LHS − ρ(v₂)‖d‖²)/‖d‖², the smallest C clearing every sampled pair.
ConditionReport check_local_monotonicity(const OperatorSuite& suite, const Discretization& disc,
                                         int n_pairs, const SamplingSpec& sampling, double c_guess);

/// (H3) with the suite's θ, C, F at t. calibrated_constant is the smallest C.
ConditionReport check_coercivity(const OperatorSuite& suite, const Discretization& disc,
                                 int n_samples, const SamplingSpec& sampling, double t = 0.0);

/// (H4) with the suite's C, F, β at t. calibrated_constant is the smallest C.
ConditionReport check_growth(const OperatorSuite& suite, const Discretization& disc, int n_samples,
                             const SamplingSpec& sampling, double t = 0.0);

/// Noise side conditions, in order C3, C4, C5.
/// Throws ConfigError if the declared constants fail γ < θ/(2β).
std::array<ConditionReport, 3> check_noise_conditions(const OperatorSuite& suite,
                                                      const LevyNoiseSpec& spec,
                                                      const Discretization& disc, int n_samples,
                                                      const SamplingSpec& sampling,
                                                      double t = 0.0);

/// Smallest sampled value of −2⟨A(v),v⟩/‖v‖^α_V, a data-driven θ for suites
/// whose Galerkin drift is only approximately −‖v‖^α_V-dissipative.
double estimate_dissipation_ratio(const OperatorSuite& suite, const Discretization& disc,
                                  int n_samples, const SamplingSpec& sampling);

/// min over random scalar pairs of (|x|^{p−2}x − |y|^{p−2}y)(x − y)/|x − y|^p,
/// the monotonicity modulus δ of the p-Laplace flux.
double p_laplace_delta_estimate(double p, int n_samples, std::uint64_t seed);

}  // namespace levyspde

#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "levyspde/noise.hpp"
#include "levyspde/operators.hpp"
#include "levyspde/spaces.hpp"

namespace levyspde {

/// explicit_euler: all of A explicit. semi_implicit: the diagonal linear part
/// backward Euler. exponential: the diagonal linear part integrated exactly
/// (integrating-factor Euler), everything else explicit.
enum class Scheme { explicit_euler, semi_implicit, exponential };
std::string to_string(Scheme scheme);
Scheme scheme_from_string(const std::string& name);

struct SolverConfig {
  double dt = 1e-3;
  double T = 1.0;
  Scheme scheme = Scheme::semi_implicit;
  double blowup_radius = 1e6;
  int record_stride = 1;
  bool record_coefficients = false;

  void validate() const;
  /// ceil(T/dt); the last step is shortened so the grid ends exactly at T.
  int steps() const;
  double time_at(int step) const;
};

struct TrajectoryRecord {
  std::vector<double> times;
  std::vector<double> norm_h;
  std::vector<double> norm_v;
  std::vector<Eigen::VectorXd> states;  // only with record_coefficients
  std::vector<JumpEvent> jumps;
  std::vector<double> jump_grid_times;  // where each jump was applied
  bool blown_up = false;
  double blowup_time = 0.0;
  std::uint64_t seed = 0;
  std::uint64_t index = 0;
  Eigen::VectorXd final_state;
  /// Left-endpoint sum of ‖X‖^β_H ‖X‖^α_V dt over the steps taken.
  double energy_integral = 0.0;
};

struct MomentReport {
  double p = 0.0;
  double sup_mean = 0.0;
  double sup_standard_error = 0.0;
  double sup_time = 0.0;
  double energy_mean = 0.0;
  double energy_standard_error = 0.0;
  int ensemble_size = 0;
  int blown_up = 0;
  double blowup_fraction = 0.0;
  std::vector<double> times;
  std::vector<double> mean_curve;
};

/// One step of the Galerkin SDE. `small_counts` are per-atom Poisson counts.
Eigen::VectorXd galerkin_step(const OperatorSuite& suite, const Discretization& disc,
                              const Eigen::VectorXd& state, double t, double dt,
                              const Eigen::VectorXd& wiener_incr, std::span<const int> small_counts,
                              const LevyNoiseSpec& spec, Scheme scheme);

/// Small-jump equation on [0,T]; noise drawn from the (master_seed, index) step stream.
TrajectoryRecord solve_path_small(const OperatorSuite& suite, const Discretization& disc,
                                  const LevyNoiseSpec& spec, const SolverConfig& config,
                                  const Eigen::VectorXd& x0, std::uint64_t master_seed,
                                  std::uint64_t index = 0);

/// Full equation by interlacing. Large-jump events come from the (master_seed,
/// index) large-jump stream unless `schedule` is given. Each event is applied
/// at the grid time floor(τ/dt)·dt, after the step ending there, using the
/// left limit.
TrajectoryRecord solve_path_interlaced(const OperatorSuite& suite, const Discretization& disc,
                                       const LevyNoiseSpec& spec, const SolverConfig& config,
                                       const Eigen::VectorXd& x0, std::uint64_t master_seed,
                                       std::uint64_t index = 0,
                                       const std::vector<JumpEvent>* schedule = nullptr);

/// Grid step after which a jump at time tau is applied.
int snapped_step(double tau, const SolverConfig& config);

using InitialLaw = std::function<Eigen::VectorXd(Rng&)>;

/// M independent trajectories on `threads` workers. Blown-up paths are
/// excluded from the estimates and counted in blowup_fraction. Throws
/// RefusalError if the suite has a non-zero large-jump map.
MomentReport ensemble_moments(const OperatorSuite& suite, const Discretization& disc,
                              const LevyNoiseSpec& spec, const SolverConfig& config,
                              const InitialLaw& x0_law, int M, std::uint64_t master_seed,
                              int threads = 1);

using SuiteFactory = std::function<OperatorSuite(const Discretization&)>;
using StateFactory = std::function<Eigen::VectorXd(const Discretization&)>;

struct ConvergenceTable {
  int reference_n = 0;
  std::vector<int> n;
  std::vector<double> error;  // ‖X^{(n)}_T − X^{(ref)}_T‖_H
  std::vector<double> ratio;  // error[i]/error[i+1]
  bool any_blown_up = false;
};

/// Runs each n and the reference with the same seed and index. Per-step draws
/// do not depend on n, so the coarse runs see the reference run's noise
/// restricted to their modes.
ConvergenceTable convergence_study(const SuiteFactory& family, DomainKind domain, int components,
                                   const LevyNoiseSpec& spec, const SolverConfig& config,
                                   const StateFactory& x0, const std::vector<int>& n_list,
                                   int reference_n, std::uint64_t master_seed);

struct StabilityTable {
  std::vector<double> times;
  std::vector<double> m;  // ‖X_t − Y_t‖²_H
  std::vector<double> d;  // exp(−∫(Ĉ + ρ(Y_s))ds)·m(t)
  double nonincreasing_fraction = 1.0;  // steps with d_{k+1} ≤ 1.05·d_k
  bool any_blown_up = false;
};

StabilityTable stability_check(const OperatorSuite& suite, const Discretization& disc,
                               const LevyNoiseSpec& spec, const SolverConfig& config,
                               const Eigen::VectorXd& x0, const Eigen::VectorXd& y0,
                               std::uint64_t master_seed, double c_hat);

/// Sum in index order by recursive halving.
double pairwise_sum(std::span<const double> values);

}  // namespace levyspde

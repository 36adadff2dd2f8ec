#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "levyspde/rng.hpp"

namespace levyspde {

/// Atom (z_j, w_j) of the small-jump measure ν restricted to D^c = {‖z‖ ≤ 1}.
struct SmallAtom {
  Eigen::VectorXd mark;
  double weight = 0.0;
};

/// Law of large marks, i.e. ν|_D / λ on D = {‖z‖ > 1}. Directions are uniform.
struct LargeMarkLaw {
  enum class Kind { fixed_radius, pareto };
  Kind kind = Kind::pareto;
  /// fixed_radius: the radius (> 1). pareto: tail index a > 0, P(‖z‖ > r) = r^{-a}.
  double parameter = 2.0;
};

/// Wiener + compensated small jumps + finite-intensity large jumps.
///
/// The Wiener part is truncated to m modes; mode i carries an additive
/// amplitude that lipschitz_noise_maps places along basis vector e_i.
class LevyNoiseSpec {
 public:
  LevyNoiseSpec() = default;
  LevyNoiseSpec(int mark_dim, Eigen::VectorXd wiener_amplitudes, std::vector<SmallAtom> atoms,
                double large_rate, LargeMarkLaw large_marks);

  int mark_dim() const { return mark_dim_; }
  int wiener_modes() const { return static_cast<int>(wiener_amplitudes_.size()); }
  const Eigen::VectorXd& wiener_amplitudes() const { return wiener_amplitudes_; }
  const std::vector<SmallAtom>& small_atoms() const { return atoms_; }
  double large_rate() const { return large_rate_; }
  const LargeMarkLaw& large_marks() const { return large_marks_; }

  /// Σ_j w_j ‖z_j‖², the atomic version of ∫_{D^c} ‖z‖² ν(dz).
  double small_second_moment() const;

 private:
  int mark_dim_ = 1;
  Eigen::VectorXd wiener_amplitudes_;
  std::vector<SmallAtom> atoms_;
  double large_rate_ = 0.0;
  LargeMarkLaw large_marks_;
};

struct JumpEvent {
  enum class Kind { small_atom, large };
  double time = 0.0;
  Eigen::VectorXd mark;
  Kind kind = Kind::large;
  int atom_index = -1;
};

/// Atoms approximating the radial density scale·r^{-1-a} on ε < r ≤ 1 by
/// mass-preserving binning (geometric bins, radius matching the bin's second
/// moment). Mass of each bin is split evenly over the ±e_i axis directions.
std::vector<SmallAtom> discretize_radial_density(double tail_index, double eps, int bins,
                                                 double scale, int mark_dim);

Eigen::VectorXd sample_wiener_increments(const LevyNoiseSpec& spec, double dt, Rng& rng);

/// Large-jump events of a Poisson(λ) process on (0, T], strictly increasing in time.
std::vector<JumpEvent> sample_large_jump_times(const LevyNoiseSpec& spec, double horizon, Rng& rng);

/// Per-atom counts k_j ~ Poisson(w_j dt).
std::vector<int> sample_small_jump_counts(const LevyNoiseSpec& spec, double dt, Rng& rng);

using MarkFunction = std::function<Eigen::VectorXd(const Eigen::VectorXd& mark)>;

/// Σ_j (k_j − w_j dt) f(z_j): the compensated Poisson integral over one step.
Eigen::VectorXd compensated_increment(const MarkFunction& f, std::span<const int> counts,
                                      const LevyNoiseSpec& spec, double dt,
                                      Eigen::Index state_dim);

struct IsometryResult {
  double mc_second_moment = 0.0;
  double analytic = 0.0;
  double standard_error = 0.0;
  double z_score = 0.0;
  /// Largest |mean|/SE over components of the accumulated integral.
  double max_mean_z = 0.0;
  int paths = 0;
};

/// Monte-Carlo check of E‖∫∫ f dÑ‖² = T Σ_j w_j ‖f(z_j)‖² for a state-independent f.
IsometryResult verify_isometry(const LevyNoiseSpec& spec, const MarkFunction& f, double horizon,
                               int n_steps, int paths, std::uint64_t seed);

}  // namespace levyspde

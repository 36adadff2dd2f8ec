#pragma once

#include <Eigen/Dense>

#include <functional>
#include <string>
#include <vector>

#include "levyspde/noise.hpp"
#include "levyspde/spaces.hpp"

namespace levyspde {

using ScalarMap = std::function<double(double)>;
using DriftFn = std::function<Eigen::VectorXd(double t, const Eigen::VectorXd& v)>;
/// Returns the dim × m matrix whose column i is B(t,v) applied to Wiener mode i.
using DiffusionFn = std::function<Eigen::MatrixXd(double t, const Eigen::VectorXd& v)>;
using JumpFn =
    std::function<Eigen::VectorXd(double t, const Eigen::VectorXd& v, const Eigen::VectorXd& mark)>;

/// State-dependent constant ρ(v) in the local monotonicity condition.
struct RhoForm {
  enum class Kind { zero, v_norm_sq, l4_quartic, v_norm_pow };
  Kind kind = Kind::zero;
  double c = 0.0;
  double power = 2.0;       // exponent t of v_norm_pow
  double v_exponent = 2.0;  // p of the W^{1,p} norm used for ‖v‖_V

  double evaluate(const Discretization& disc, const Eigen::VectorXd& v) const;
  std::string describe() const;
};

/// Deterministic realization of the adapted bound process F_t.
struct BoundProcess {
  double constant = 0.0;
  std::function<double(double)> profile;  // overrides `constant` when set

  double operator()(double t) const { return profile ? profile(t) : constant; }
};

/// Declared constants of the framework hypotheses for one operator suite.
struct FrameworkConstants {
  double alpha = 2.0;
  double beta = 0.0;
  double theta = 1.0;
  double C = 0.0;
  double gamma = 0.0;
  RhoForm rho;
  BoundProcess F;

  /// α > 1, θ > 0, β, C, γ ≥ 0, and γ < θ/(2β) whenever β > 0.
  void validate() const;
};

enum class JumpProfile { constant, norm, min_norm };
JumpProfile jump_profile_from_string(const std::string& name);
double evaluate_jump_profile(JumpProfile h, const Eigen::VectorXd& mark);

struct LargeJumpMap {
  enum class Kind { zero, additive, linear };
  Kind kind = Kind::zero;
  double scale = 0.0;
  /// Direction added by an additive jump (scaled by scale·z₀).
  Eigen::VectorXd profile;
};

/// B, f and g together with the data needed to state their Lipschitz bounds.
struct NoiseMaps {
  DiffusionFn diffusion;
  JumpFn small_jump;
  JumpFn large_jump;
  bool large_jump_is_zero = true;
  int wiener_modes = 0;
  double b_scale = 0.0;
  double f_scale = 0.0;
  /// Small-jump atoms the maps were built against; jump integrals are sums over them.
  std::vector<SmallAtom> atoms;
  /// Σ_j w_j h(z_j)², so ∫‖f(v₁,z) − f(v₂,z)‖² ν(dz) = f_scale²·this·‖v₁ − v₂‖².
  double jump_profile_sq_sum = 0.0;

  /// H-Lipschitz constant L with ‖B(v₁)−B(v₂)‖² + ∫‖f(v₁)−f(v₂)‖²ν = L‖v₁−v₂‖².
  double lipschitz_constant() const { return b_scale * b_scale + f_scale * f_scale * jump_profile_sq_sum; }
};

/// The quadruple (A, B, f, g) as Galerkin images in H_n, with its declared constants.
///
/// A = diag(linear_part) + nonlinear_part. The diagonal part is the stiff linear
/// operator treated implicitly by the semi-implicit and exponential schemes.
struct OperatorSuite {
  std::string name;
  DiscretizationId disc_id;
  Eigen::VectorXd linear_part;
  DriftFn nonlinear_part;
  NoiseMaps noise;
  FrameworkConstants constants;

  Eigen::VectorXd drift(double t, const Eigen::VectorXd& v) const {
    return linear_part.cwiseProduct(v) + nonlinear_part(t, v);
  }
  Eigen::MatrixXd diffusion(double t, const Eigen::VectorXd& v) const { return noise.diffusion(t, v); }
  Eigen::VectorXd small_jump(double t, const Eigen::VectorXd& v, const Eigen::VectorXd& z) const {
    return noise.small_jump(t, v, z);
  }
  Eigen::VectorXd large_jump(double t, const Eigen::VectorXd& v, const Eigen::VectorXd& z) const {
    return noise.large_jump(t, v, z);
  }
  bool g_is_zero() const { return noise.large_jump_is_zero; }
};

/// Noise maps with no Wiener modes and f ≡ g ≡ 0.
NoiseMaps zero_noise_maps(const Discretization& disc);

/// B(v)e_i = a_i e_i + b_scale·v/√m (a_i the spec's additive amplitudes),
/// f(v,z) = f_scale·h(z)·v, g per `g_map`. On torus vector fields the additive
/// directions are Leray-projected so the maps preserve incompressibility.
NoiseMaps lipschitz_noise_maps(const Discretization& disc, const LevyNoiseSpec& spec, double b_scale,
                               double f_scale, JumpProfile h_profile, const LargeJumpMap& g_map,
                               double beta);

/// A(u) = Δu + f(u)u_x + f0(u) on (0,1) with Dirichlet data, nonlinearity
/// evaluated on the quadrature grid. Constants: α = 2, β = 4, θ = 1, ρ = ‖v‖²_V.
OperatorSuite burgers_suite(const Discretization& disc, ScalarMap f_lip, ScalarMap f0,
                            NoiseMaps noise);

/// A(u) = (|u_x|^{p−2}u_x)_x + f0(u) with a compact centred finite-difference
/// flux on the quadrature grid. Constants: α = p, β = 4. Throws for p ≤ 2.
OperatorSuite p_laplace_suite(const Discretization& disc, double p, ScalarMap f0, NoiseMaps noise);

/// A(u) = νΔu + F(u) + f0 on the 2-torus, F(u) = −P_H[(u·∇)u].
/// Constants: α = 2, β = 2, θ = ν, F = ‖f0‖²_{V*}/ν, ρ = (64/ν³)‖v‖⁴_{L⁴}.
OperatorSuite ns2d_suite(const Discretization& disc, double viscosity, Eigen::VectorXd forcing,
                         NoiseMaps noise);

/// F(u,v) = −P_H[(u·∇)v] for torus vector fields.
Eigen::VectorXd ns_advection(const Discretization& disc, const Eigen::VectorXd& u,
                             const Eigen::VectorXd& v);

StateVector leray_project(const Discretization& disc, const StateVector& field);

}  // namespace levyspde

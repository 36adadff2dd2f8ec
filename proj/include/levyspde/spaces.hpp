#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "levyspde/rng.hpp"

namespace levyspde {

enum class DomainKind { interval_dirichlet, torus2d };
enum class BasisKind { sine_spectral, fourier };

std::string to_string(DomainKind kind);
DomainKind domain_from_string(const std::string& name);

struct DiscretizationId {
  DomainKind domain = DomainKind::interval_dirichlet;
  int n = 0;
  int components = 1;
  bool operator==(const DiscretizationId&) const = default;
};

/// Coefficients of an element of H_n in the orthonormal basis of a discretization.
struct StateVector {
  Eigen::VectorXd coeffs;
  DiscretizationId disc_id;
};

/// Wavevector of a torus mode. Only the half-plane k1 > 0 or (k1 == 0, k2 > 0)
/// is stored; each wavevector carries a cosine and a sine basis function.
struct TorusMode {
  int k1 = 0;
  int k2 = 0;
};

/// Finite model of V ⊂ H ⊂ V*.
///
/// interval_dirichlet: Λ = (0,1), e_k = √2 sin(kπx), k = 1..n, H = L², V = W₀^{1,p}.
/// torus2d: Λ = [0,2π)², mean-free real Fourier basis cos(k·x)/(π√2), sin(k·x)/(π√2)
/// with max(|k1|,|k2|) ≤ n, `components` copies interleaved per basis function.
///
/// Coefficients are ordered so that the discretization at n' < n is a prefix
/// of the one at n; this makes Pₙ a truncation and coarse/fine embedding a copy.
///
/// Nonlinear terms are evaluated on a uniform quadrature grid padded by a factor
/// two over the retained band, so quartic products of retained modes integrate
/// exactly. The object is immutable and cheap to copy (shared storage).
class Discretization {
 public:
  Discretization() = default;

  DomainKind domain() const { return id_.domain; }
  BasisKind basis() const;
  int n() const { return id_.n; }
  int components() const { return id_.components; }
  int spatial_dims() const { return id_.domain == DomainKind::torus2d ? 2 : 1; }
  const DiscretizationId& id() const { return id_; }
  Eigen::Index dim() const;

  /// Number of coefficients retained by Pₙ' for n' ≤ n.
  Eigen::Index leading_dim(int n_target) const;

  /// −Δ eigenvalue of each basis function ((kπ)² or |k|²).
  const Eigen::VectorXd& stiffness() const;
  /// Wavenumber magnitude of each coefficient (k or |k|), used for spectral decay.
  const Eigen::VectorXd& wavenumber() const;
  const std::vector<TorusMode>& torus_modes() const;

  // Quadrature grid.
  Eigen::Index grid_size() const;
  Eigen::Index points_per_dim() const;
  const Eigen::VectorXd& weights() const;
  /// Interval node spacing h (nodes x_j = j·h, j = 0..M).
  double spacing() const;
  Eigen::VectorXd interval_nodes() const;

  /// Grid values: rows = grid points, cols = components.
  Eigen::MatrixXd synthesize(const Eigen::VectorXd& coeffs) const;
  /// Grid values of spatial derivatives: column c*dims + d holds ∂_d v_c.
  Eigen::MatrixXd gradient(const Eigen::VectorXd& coeffs) const;
  /// Quadrature projection of a grid field onto the retained basis.
  Eigen::VectorXd analyze(const Eigen::MatrixXd& grid_values) const;

  /// Helmholtz–Leray projection per wavevector; identity for scalar fields.
  Eigen::VectorXd divergence_free_part(const Eigen::VectorXd& coeffs) const;
  /// max over modes of |k·û_k| (0 for scalar fields).
  double max_divergence(const Eigen::VectorXd& coeffs) const;

  // Norms on raw coefficient vectors (no id check).
  double h_norm(const Eigen::VectorXd& coeffs) const { return coeffs.norm(); }
  /// (∫|∇v|^p)^{1/p}; spectral for p = 2, grid quadrature otherwise.
  double v_norm(const Eigen::VectorXd& coeffs, double p = 2.0) const;
  /// Always grid quadrature, used to cross-check the spectral formula.
  double gradient_lp_quadrature(const Eigen::VectorXd& coeffs, double p) const;
  /// (∫|v|^p)^{1/p} with |v| the Euclidean norm over components.
  double lp_norm(const Eigen::VectorXd& coeffs, double p) const;
  /// Norm of the Galerkin dual for α = 2: sup ⟨w,v⟩ over ‖v‖_V = 1.
  double dual_norm_v2(const Eigen::VectorXd& coeffs) const;

  friend Discretization build_discretization(DomainKind domain, int n, int components);

 private:
  struct Impl;
  DiscretizationId id_;
  std::shared_ptr<const Impl> impl_;
};

Discretization build_discretization(DomainKind domain, int n, int components = 1);

StateVector make_state(const Discretization& disc, Eigen::VectorXd coeffs);
/// Throws DimensionError unless v belongs to disc and has finite entries.
void require_state(const Discretization& disc, const StateVector& v);

/// Pₙ: keeps the modes retained at n_target, zeroes the rest (same length).
StateVector project(const Discretization& disc, const Eigen::VectorXd& coeffs_full, int n_target);

/// Copies coefficients between nested discretizations of the same kind.
Eigen::VectorXd embed(const Discretization& from, const Eigen::VectorXd& coeffs,
                      const Discretization& to);

double norm_H(const Discretization& disc, const StateVector& v);
double norm_V(const Discretization& disc, const StateVector& v, double p = 2.0);
/// V*-V pairing of Galerkin representatives, i.e. the H inner product of coefficients.
double dual_pair(const Discretization& disc, const StateVector& w, const StateVector& v);

struct LadyzhenskayaMargin {
  double lhs = 0.0;        // ‖v‖⁴_{L⁴}
  double rhs_ratio = 0.0;  // ‖v‖⁴_{L⁴} / (‖v‖²_H ‖v‖²_V), 0 at v = 0
};
LadyzhenskayaMargin check_ladyzhenskaya_2d(const Discretization& disc, const StateVector& v);

/// Gaussian band-limited field with coefficient std k^{-decay}, rescaled to
/// ‖v‖_H = radius. Torus vector fields are made divergence-free first.
Eigen::VectorXd random_band_limited(const Discretization& disc, double decay, double radius,
                                    Rng& rng);

/// Coefficients of common smooth profiles.
/// interval: "sine" (√2 sin(mode·πx) scaled), "parabola" (x(1−x) scaled).
/// torus:    "taylor_green" ((sin x cos y, −cos x sin y) scaled), "shear" (sin(mode·y) e_x).
Eigen::VectorXd profile_coefficients(const Discretization& disc, const std::string& profile,
                                     double amplitude, int mode = 1);

/// Squared-norm helper usable on any Eigen expression.
template <typename Derived>
typename Derived::Scalar squared_h_norm(const Eigen::MatrixBase<Derived>& coeffs) {
  return coeffs.squaredNorm();
}

}  // namespace levyspde

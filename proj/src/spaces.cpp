#include "levyspde/spaces.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <numbers>

#include "levyspde/errors.hpp"

namespace levyspde {

namespace {

using std::numbers::pi;
using cd = std::complex<double>;
using Eigen::Index;
using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXd;

// Grid padding over the retained band: quartic products integrate exactly.
constexpr int kPadding = 2;

}  // namespace

struct Discretization::Impl {
  Index dim = 0;
  VectorXd stiffness;
  VectorXd wavenumber;
  VectorXd weights;
  Index points_per_dim = 0;
  double spacing = 0.0;

  // interval_dirichlet
  MatrixXd synth;      // (M+1) x n
  MatrixXd synth_dx;   // (M+1) x n
  MatrixXd analysis;   // n x (M+1)

  // torus2d
  std::vector<TorusMode> modes;
  int box = 0;        // 2n+1
  MatrixXcd expo;     // M x box, exp(i k x_j)
  MatrixXcd expo_t;   // box x M
  MatrixXcd expo_h;   // box x M, conjugate transpose
  MatrixXcd expo_c;   // M x box, conjugate
};

std::string to_string(DomainKind kind) {
  return kind == DomainKind::torus2d ? "torus2d" : "interval_dirichlet";
}

DomainKind domain_from_string(const std::string& name) {
  if (name == "interval_dirichlet") return DomainKind::interval_dirichlet;
  if (name == "torus2d") return DomainKind::torus2d;
  throw ConfigError("unknown domain kind '" + name + "'");
}

BasisKind Discretization::basis() const {
  return id_.domain == DomainKind::torus2d ? BasisKind::fourier : BasisKind::sine_spectral;
}

Index Discretization::dim() const { return impl_ ? impl_->dim : 0; }

Index Discretization::leading_dim(int n_target) const {
  if (n_target < 0 || n_target > id_.n) {
    throw DimensionError("n_target " + std::to_string(n_target) + " exceeds retained modes (n = " +
                         std::to_string(id_.n) + ")");
  }
  if (id_.domain == DomainKind::interval_dirichlet) return n_target;
  return static_cast<Index>(4) * n_target * (n_target + 1) * id_.components;
}

const VectorXd& Discretization::stiffness() const { return impl_->stiffness; }
const VectorXd& Discretization::wavenumber() const { return impl_->wavenumber; }
const std::vector<TorusMode>& Discretization::torus_modes() const { return impl_->modes; }
Index Discretization::grid_size() const { return impl_->weights.size(); }
Index Discretization::points_per_dim() const { return impl_->points_per_dim; }
const VectorXd& Discretization::weights() const { return impl_->weights; }
double Discretization::spacing() const { return impl_->spacing; }

VectorXd Discretization::interval_nodes() const {
  const Index m = impl_->points_per_dim;
  return VectorXd::LinSpaced(m, 0.0, 1.0);
}

Discretization build_discretization(DomainKind domain, int n, int components) {
  if (n < 1) throw ConfigError("discretization requires n >= 1");
  if (components != 1 && components != 2) throw ConfigError("components must be 1 or 2");
  if (components == 2 && domain != DomainKind::torus2d) {
    throw ConfigError("two-component fields are only supported on torus2d");
  }

  Discretization disc;
  disc.id_ = DiscretizationId{domain, n, components};
  auto impl = std::make_shared<Discretization::Impl>();

  if (domain == DomainKind::interval_dirichlet) {
    const int intervals = kPadding * (n + 1);
    const Index nodes = intervals + 1;
    const double h = 1.0 / intervals;
    impl->dim = n;
    impl->spacing = h;
    impl->points_per_dim = nodes;
    impl->weights = VectorXd::Constant(nodes, h);
    impl->weights(0) = impl->weights(nodes - 1) = 0.5 * h;
    impl->stiffness.resize(n);
    impl->wavenumber.resize(n);
    impl->synth.resize(nodes, n);
    impl->synth_dx.resize(nodes, n);
    for (int k = 1; k <= n; ++k) {
      impl->stiffness(k - 1) = (k * pi) * (k * pi);
      impl->wavenumber(k - 1) = k;
      for (Index j = 0; j < nodes; ++j) {
        const double x = j * h;
        // exact zeros at the Dirichlet nodes
        impl->synth(j, k - 1) =
            (j == 0 || j == nodes - 1) ? 0.0 : std::sqrt(2.0) * std::sin(k * pi * x);
        impl->synth_dx(j, k - 1) = std::sqrt(2.0) * k * pi * std::cos(k * pi * x);
      }
    }
    impl->analysis = impl->synth.transpose() * impl->weights.asDiagonal();
  } else {
    for (int shell = 1; shell <= n; ++shell) {
      for (int k1 = 0; k1 <= shell; ++k1) {
        for (int k2 = -shell; k2 <= shell; ++k2) {
          if (std::max(std::abs(k1), std::abs(k2)) != shell) continue;
          if (k1 == 0 && k2 <= 0) continue;
          impl->modes.push_back({k1, k2});
        }
      }
    }
    const Index nmodes = static_cast<Index>(impl->modes.size());
    impl->dim = nmodes * 2 * components;
    impl->stiffness.resize(impl->dim);
    impl->wavenumber.resize(impl->dim);
    for (Index j = 0; j < nmodes; ++j) {
      const auto [k1, k2] = impl->modes[j];
      const double k_sq = static_cast<double>(k1 * k1 + k2 * k2);
      for (int t = 0; t < 2; ++t) {
        for (int c = 0; c < components; ++c) {
          const Index i = (j * 2 + t) * components + c;
          impl->stiffness(i) = k_sq;
          impl->wavenumber(i) = std::sqrt(k_sq);
        }
      }
    }
    impl->box = 2 * n + 1;
    const Index m = static_cast<Index>(kPadding) * impl->box;
    impl->points_per_dim = m;
    impl->spacing = 2.0 * pi / m;
    impl->weights = VectorXd::Constant(m * m, impl->spacing * impl->spacing);
    impl->expo.resize(m, impl->box);
    for (Index j = 0; j < m; ++j) {
      const double x = j * impl->spacing;
      for (int k = -n; k <= n; ++k) impl->expo(j, k + n) = std::polar(1.0, k * x);
    }
    impl->expo_t = impl->expo.transpose();
    impl->expo_h = impl->expo.adjoint();
    impl->expo_c = impl->expo.conjugate();
  }
  disc.impl_ = std::move(impl);
  return disc;
}

namespace {

// Complex Fourier box of one component, optionally multiplied by i·k_d.
MatrixXcd torus_box(const Discretization& disc, const VectorXd& coeffs, int comp, int deriv_dir) {
  const int n = disc.n();
  const int comps = disc.components();
  const auto& modes = disc.torus_modes();
  MatrixXcd box = MatrixXcd::Zero(2 * n + 1, 2 * n + 1);
  const double norm = 1.0 / (2.0 * pi * std::sqrt(2.0));
  for (Index j = 0; j < static_cast<Index>(modes.size()); ++j) {
    const auto [k1, k2] = modes[j];
    const double a = coeffs((j * 2) * comps + comp);
    const double b = coeffs((j * 2 + 1) * comps + comp);
    cd c(a * norm, -b * norm);
    if (deriv_dir == 0) c *= cd(0.0, k1);
    if (deriv_dir == 1) c *= cd(0.0, k2);
    box(k1 + n, k2 + n) += c;
    box(-k1 + n, -k2 + n) += std::conj(c);
  }
  return box;
}

}  // namespace

MatrixXd Discretization::synthesize(const VectorXd& coeffs) const {
  if (coeffs.size() != dim()) throw DimensionError("synthesize: coefficient length mismatch");
  if (id_.domain == DomainKind::interval_dirichlet) return impl_->synth * coeffs;
  const Index m = impl_->points_per_dim;
  MatrixXd out(m * m, id_.components);
  for (int c = 0; c < id_.components; ++c) {
    const MatrixXd grid = (impl_->expo * torus_box(*this, coeffs, c, -1) * impl_->expo_t).real();
    out.col(c) = Eigen::Map<const MatrixXd>(grid.data(), m * m, 1);
  }
  return out;
}

MatrixXd Discretization::gradient(const VectorXd& coeffs) const {
  if (coeffs.size() != dim()) throw DimensionError("gradient: coefficient length mismatch");
  if (id_.domain == DomainKind::interval_dirichlet) return impl_->synth_dx * coeffs;
  const Index m = impl_->points_per_dim;
  MatrixXd out(m * m, id_.components * 2);
  for (int c = 0; c < id_.components; ++c) {
    for (int d = 0; d < 2; ++d) {
      const MatrixXd grid =
          (impl_->expo * torus_box(*this, coeffs, c, d) * impl_->expo_t).real();
      out.col(c * 2 + d) = Eigen::Map<const MatrixXd>(grid.data(), m * m, 1);
    }
  }
  return out;
}

VectorXd Discretization::analyze(const MatrixXd& grid_values) const {
  if (grid_values.rows() != grid_size() || grid_values.cols() != id_.components) {
    throw DimensionError("analyze: grid field shape mismatch");
  }
  if (id_.domain == DomainKind::interval_dirichlet) return impl_->analysis * grid_values.col(0);
  const Index m = impl_->points_per_dim;
  const int n = id_.n;
  const auto& modes = impl_->modes;
  VectorXd out(dim());
  const double scale = 2.0 * std::sqrt(2.0) * pi / static_cast<double>(m * m);
  for (int c = 0; c < id_.components; ++c) {
    const MatrixXd g = Eigen::Map<const MatrixXd>(grid_values.col(c).data(), m, m);
    const MatrixXcd hat = impl_->expo_h * g * impl_->expo_c;
    for (Index j = 0; j < static_cast<Index>(modes.size()); ++j) {
      const cd v = hat(modes[j].k1 + n, modes[j].k2 + n);
      out((j * 2) * id_.components + c) = scale * v.real();
      out((j * 2 + 1) * id_.components + c) = -scale * v.imag();
    }
  }
  return out;
}

VectorXd Discretization::divergence_free_part(const VectorXd& coeffs) const {
  if (coeffs.size() != dim()) throw DimensionError("leray: coefficient length mismatch");
  if (id_.domain != DomainKind::torus2d || id_.components != 2) return coeffs;
  VectorXd out = coeffs;
  const auto& modes = impl_->modes;
  for (Index j = 0; j < static_cast<Index>(modes.size()); ++j) {
    const double k1 = modes[j].k1;
    const double k2 = modes[j].k2;
    const double k_sq = k1 * k1 + k2 * k2;
    for (int t = 0; t < 2; ++t) {
      const Index i = (j * 2 + t) * 2;
      const double dot = k1 * coeffs(i) + k2 * coeffs(i + 1);
      out(i) = coeffs(i) - k1 * dot / k_sq;
      out(i + 1) = coeffs(i + 1) - k2 * dot / k_sq;
    }
  }
  return out;
}

double Discretization::max_divergence(const VectorXd& coeffs) const {
  if (id_.domain != DomainKind::torus2d || id_.components != 2) return 0.0;
  double worst = 0.0;
  const auto& modes = impl_->modes;
  for (Index j = 0; j < static_cast<Index>(modes.size()); ++j) {
    for (int t = 0; t < 2; ++t) {
      const Index i = (j * 2 + t) * 2;
      worst = std::max(worst, std::abs(modes[j].k1 * coeffs(i) + modes[j].k2 * coeffs(i + 1)));
    }
  }
  return worst;
}

double Discretization::gradient_lp_quadrature(const VectorXd& coeffs, double p) const {
  const MatrixXd grad = gradient(coeffs);
  const VectorXd mag_sq = grad.rowwise().squaredNorm();
  const double integral = (impl_->weights.array() * mag_sq.array().pow(0.5 * p)).sum();
  return std::pow(integral, 1.0 / p);
}

double Discretization::v_norm(const VectorXd& coeffs, double p) const {
  if (p == 2.0) return std::sqrt((impl_->stiffness.array() * coeffs.array().square()).sum());
  return gradient_lp_quadrature(coeffs, p);
}

double Discretization::lp_norm(const VectorXd& coeffs, double p) const {
  const MatrixXd grid = synthesize(coeffs);
  const VectorXd mag_sq = grid.rowwise().squaredNorm();
  const double integral = (impl_->weights.array() * mag_sq.array().pow(0.5 * p)).sum();
  return std::pow(integral, 1.0 / p);
}

double Discretization::dual_norm_v2(const VectorXd& coeffs) const {
  return std::sqrt((coeffs.array().square() / impl_->stiffness.array()).sum());
}

StateVector make_state(const Discretization& disc, VectorXd coeffs) {
  if (coeffs.size() != disc.dim()) {
    throw DimensionError("state has " + std::to_string(coeffs.size()) +
                         " coefficients, discretization expects " + std::to_string(disc.dim()));
  }
  return StateVector{std::move(coeffs), disc.id()};
}

void require_state(const Discretization& disc, const StateVector& v) {
  if (!(v.disc_id == disc.id()) || v.coeffs.size() != disc.dim()) {
    throw DimensionError("state does not belong to this discretization");
  }
  if (!v.coeffs.allFinite()) throw DimensionError("state has non-finite coefficients");
}

StateVector project(const Discretization& disc, const VectorXd& coeffs_full, int n_target) {
  if (coeffs_full.size() != disc.dim()) throw DimensionError("project: coefficient length mismatch");
  const Index keep = disc.leading_dim(n_target);
  VectorXd out = VectorXd::Zero(coeffs_full.size());
  out.head(keep) = coeffs_full.head(keep);
  return StateVector{std::move(out), disc.id()};
}

VectorXd embed(const Discretization& from, const VectorXd& coeffs, const Discretization& to) {
  if (from.domain() != to.domain() || from.components() != to.components()) {
    throw DimensionError("embed: discretizations are not nested");
  }
  if (coeffs.size() != from.dim()) throw DimensionError("embed: coefficient length mismatch");
  VectorXd out = VectorXd::Zero(to.dim());
  const Index shared = std::min(from.dim(), to.dim());
  out.head(shared) = coeffs.head(shared);
  return out;
}

double norm_H(const Discretization& disc, const StateVector& v) {
  require_state(disc, v);
  return disc.h_norm(v.coeffs);
}

double norm_V(const Discretization& disc, const StateVector& v, double p) {
  if (!(p >= 2.0)) throw ParameterError("norm_V requires p >= 2");
  require_state(disc, v);
  return disc.v_norm(v.coeffs, p);
}

double dual_pair(const Discretization& disc, const StateVector& w, const StateVector& v) {
  require_state(disc, w);
  require_state(disc, v);
  return w.coeffs.dot(v.coeffs);
}

LadyzhenskayaMargin check_ladyzhenskaya_2d(const Discretization& disc, const StateVector& v) {
  if (disc.domain() != DomainKind::torus2d) {
    throw ConfigError("Ladyzhenskaya check requires a torus2d discretization");
  }
  require_state(disc, v);
  LadyzhenskayaMargin out;
  const double l4 = disc.lp_norm(v.coeffs, 4.0);
  out.lhs = std::pow(l4, 4);
  const double denom = v.coeffs.squaredNorm() * disc.v_norm(v.coeffs, 2.0) *
                       disc.v_norm(v.coeffs, 2.0);
  out.rhs_ratio = denom > 0.0 ? out.lhs / denom : 0.0;
  return out;
}

VectorXd random_band_limited(const Discretization& disc, double decay, double radius, Rng& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  VectorXd v(disc.dim());
  const VectorXd& k = disc.wavenumber();
  for (Index i = 0; i < v.size(); ++i) v(i) = gauss(rng) * std::pow(k(i), -decay);
  v = disc.divergence_free_part(v);
  const double norm = v.norm();
  if (norm == 0.0) return v;
  return v * (radius / norm);
}

VectorXd profile_coefficients(const Discretization& disc, const std::string& profile,
                              double amplitude, int mode) {
  VectorXd out = VectorXd::Zero(disc.dim());
  if (disc.domain() == DomainKind::interval_dirichlet) {
    if (profile == "sine") {
      if (mode < 1 || mode > disc.n()) throw ConfigError("sine profile mode outside retained band");
      out(mode - 1) = amplitude / std::sqrt(2.0);
      return out;
    }
    if (profile == "parabola") {
      for (int k = 1; k <= disc.n(); k += 2) {
        out(k - 1) = amplitude * std::sqrt(2.0) * 4.0 / std::pow(k * pi, 3);
      }
      return out;
    }
    if (profile == "zero") return out;
    throw ConfigError("unknown interval profile '" + profile + "'");
  }

  if (mode < 1 || mode > disc.n()) throw ConfigError("torus profile mode outside retained band");
  std::function<void(double, double, double*)> field;
  const double m = mode;
  if (profile == "zero") return out;
  if (profile == "taylor_green") {
    field = [m](double x, double y, double* u) {
      u[0] = std::sin(m * x) * std::cos(m * y);
      u[1] = -std::cos(m * x) * std::sin(m * y);
    };
  } else if (profile == "shear") {
    field = [m](double, double y, double* u) {
      u[0] = std::sin(m * y);
      u[1] = 0.0;
    };
  } else if (profile == "sin_sin") {
    field = [m](double x, double y, double* u) { u[0] = u[1] = std::sin(m * x) * std::sin(m * y); };
  } else {
    throw ConfigError("unknown torus profile '" + profile + "'");
  }
  const Index pts = disc.points_per_dim();
  const double h = disc.spacing();
  MatrixXd grid(pts * pts, disc.components());
  for (Index l = 0; l < pts; ++l) {
    for (Index j = 0; j < pts; ++j) {
      double u[2];
      field(j * h, l * h, u);
      for (int c = 0; c < disc.components(); ++c) grid(j + pts * l, c) = amplitude * u[c];
    }
  }
  return disc.analyze(grid);
}

}  // namespace levyspde

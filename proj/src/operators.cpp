#include "levyspde/operators.hpp"

#include <cmath>
#include <sstream>

#include "levyspde/errors.hpp"

namespace levyspde {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

double RhoForm::evaluate(const Discretization& disc, const VectorXd& v) const {
  switch (kind) {
    case Kind::zero:
      return 0.0;
    case Kind::v_norm_sq: {
      const double nv = disc.v_norm(v, v_exponent);
      return c * nv * nv;
    }
    case Kind::l4_quartic:
      return c * std::pow(disc.lp_norm(v, 4.0), 4);
    case Kind::v_norm_pow:
      return c * std::pow(disc.v_norm(v, v_exponent), power);
  }
  return 0.0;
}

std::string RhoForm::describe() const {
  std::ostringstream os;
  switch (kind) {
    case Kind::zero:
      return "0";
    case Kind::v_norm_sq:
      os << c << "*|v|_V^2";
      break;
    case Kind::l4_quartic:
      os << c << "*|v|_L4^4";
      break;
    case Kind::v_norm_pow:
      os << c << "*|v|_V^" << power;
      break;
  }
  return os.str();
}

void FrameworkConstants::validate() const {
  if (!(alpha > 1.0)) throw ConfigError("constants: alpha must be > 1");
  if (!(beta >= 0.0)) throw ConfigError("constants: beta must be >= 0");
  if (!(theta > 0.0)) throw ConfigError("constants: theta must be > 0");
  if (!(C >= 0.0)) throw ConfigError("constants: C must be >= 0");
  if (!(gamma >= 0.0)) throw ConfigError("constants: gamma must be >= 0");
  if (!(rho.c >= 0.0)) throw ConfigError("constants: rho coefficient must be >= 0");
  if (beta > 0.0 && !(gamma < theta / (2.0 * beta))) {
    std::ostringstream os;
    os << "constants: gamma = " << gamma << " violates gamma < theta/(2 beta) = "
       << theta / (2.0 * beta);
    throw ConfigError(os.str());
  }
}

JumpProfile jump_profile_from_string(const std::string& name) {
  if (name == "constant") return JumpProfile::constant;
  if (name == "norm") return JumpProfile::norm;
  if (name == "min_norm") return JumpProfile::min_norm;
  throw ConfigError("unknown jump profile '" + name + "'");
}

double evaluate_jump_profile(JumpProfile h, const VectorXd& mark) {
  switch (h) {
    case JumpProfile::constant:
      return 1.0;
    case JumpProfile::norm:
      return mark.norm();
    case JumpProfile::min_norm:
      return std::min(mark.norm(), 1.0);
  }
  return 0.0;
}

NoiseMaps zero_noise_maps(const Discretization& disc) {
  const Index dim = disc.dim();
  NoiseMaps maps;
  maps.diffusion = [dim](double, const VectorXd&) { return MatrixXd(dim, 0); };
  maps.small_jump = [dim](double, const VectorXd&, const VectorXd&) -> VectorXd {
    return VectorXd::Zero(dim);
  };
  maps.large_jump = maps.small_jump;
  return maps;
}

NoiseMaps lipschitz_noise_maps(const Discretization& disc, const LevyNoiseSpec& spec, double b_scale,
                               double f_scale, JumpProfile h_profile, const LargeJumpMap& g_map,
                               double beta) {
  const Index dim = disc.dim();
  const int m = spec.wiener_modes();

  double sum_sq = 0.0;
  double sum_high = 0.0;
  for (const auto& atom : spec.small_atoms()) {
    const double h = evaluate_jump_profile(h_profile, atom.mark);
    sum_sq += atom.weight * h * h;
    sum_high += atom.weight * std::pow(h, beta + 2.0);
  }
  if (!std::isfinite(sum_sq) || !std::isfinite(sum_high)) {
    throw ConfigError("jump profile h is not square- and (beta+2)-summable over the atoms");
  }

  NoiseMaps maps;
  maps.wiener_modes = m;
  maps.b_scale = b_scale;
  maps.f_scale = f_scale;
  maps.jump_profile_sq_sum = sum_sq;
  maps.atoms = spec.small_atoms();

  MatrixXd additive = MatrixXd::Zero(dim, m);
  for (int i = 0; i < m && i < dim; ++i) {
    VectorXd e = VectorXd::Zero(dim);
    e(i) = spec.wiener_amplitudes()(i);
    additive.col(i) = disc.divergence_free_part(e);
  }
  const double mult = m > 0 ? b_scale / std::sqrt(static_cast<double>(m)) : 0.0;
  maps.diffusion = [additive, mult](double, const VectorXd& v) -> MatrixXd {
    MatrixXd out = additive;
    if (mult != 0.0) out.colwise() += mult * v;
    return out;
  };

  maps.small_jump = [f_scale, h_profile](double, const VectorXd& v, const VectorXd& z) -> VectorXd {
    return (f_scale * evaluate_jump_profile(h_profile, z)) * v;
  };

  switch (g_map.kind) {
    case LargeJumpMap::Kind::zero:
      maps.large_jump = [dim](double, const VectorXd&, const VectorXd&) -> VectorXd {
        return VectorXd::Zero(dim);
      };
      maps.large_jump_is_zero = true;
      break;
    case LargeJumpMap::Kind::additive: {
      if (g_map.profile.size() != dim) {
        throw DimensionError("additive large-jump profile does not match the discretization");
      }
      const VectorXd dir = disc.divergence_free_part(g_map.profile) * g_map.scale;
      maps.large_jump = [dir](double, const VectorXd&, const VectorXd& z) -> VectorXd {
        return z(0) * dir;
      };
      maps.large_jump_is_zero = false;
      break;
    }
    case LargeJumpMap::Kind::linear: {
      const double s = g_map.scale;
      maps.large_jump = [s](double, const VectorXd& v, const VectorXd&) -> VectorXd {
        return s * v;
      };
      maps.large_jump_is_zero = false;
      break;
    }
  }
  return maps;
}

namespace {

void require_interval(const Discretization& disc, const char* what) {
  if (disc.domain() != DomainKind::interval_dirichlet || disc.components() != 1) {
    throw ConfigError(std::string(what) + " requires a scalar interval_dirichlet discretization");
  }
}

}  // namespace

OperatorSuite burgers_suite(const Discretization& disc, ScalarMap f_lip, ScalarMap f0,
                            NoiseMaps noise) {
  require_interval(disc, "burgers_suite");
  OperatorSuite suite;
  suite.name = "burgers";
  suite.disc_id = disc.id();
  suite.linear_part = -disc.stiffness();
  suite.nonlinear_part = [disc, f_lip, f0](double, const VectorXd& v) -> VectorXd {
    if (!f_lip && !f0) return VectorXd::Zero(v.size());
    const VectorXd u = disc.synthesize(v).col(0);
    VectorXd g = VectorXd::Zero(u.size());
    if (f_lip) {
      const VectorXd ux = disc.gradient(v).col(0);
      for (Index j = 0; j < u.size(); ++j) g(j) += f_lip(u(j)) * ux(j);
    }
    if (f0) {
      for (Index j = 0; j < u.size(); ++j) g(j) += f0(u(j));
    }
    return disc.analyze(g);
  };
  suite.noise = std::move(noise);
  suite.constants.alpha = 2.0;
  suite.constants.beta = 4.0;
  suite.constants.theta = 1.0;
  suite.constants.rho = RhoForm{RhoForm::Kind::v_norm_sq, 1.0, 2.0, 2.0};
  return suite;
}

OperatorSuite p_laplace_suite(const Discretization& disc, double p, ScalarMap f0, NoiseMaps noise) {
  if (!(p > 2.0)) {
    throw ParameterError("p-Laplace requires p > 2; p = 2 is the Laplacian (burgers_suite with f = 0)");
  }
  require_interval(disc, "p_laplace_suite");
  OperatorSuite suite;
  suite.name = "p_laplace";
  suite.disc_id = disc.id();
  suite.linear_part = VectorXd::Zero(disc.dim());
  suite.nonlinear_part = [disc, p, f0](double, const VectorXd& v) -> VectorXd {
    const VectorXd u = disc.synthesize(v).col(0);
    const Index nodes = u.size();
    const double h = disc.spacing();
    VectorXd flux(nodes - 1);
    for (Index j = 0; j + 1 < nodes; ++j) {
      const double g = (u(j + 1) - u(j)) / h;
      flux(j) = std::pow(std::abs(g), p - 2.0) * g;
    }
    VectorXd a = VectorXd::Zero(nodes);
    for (Index j = 1; j + 1 < nodes; ++j) {
      a(j) = (flux(j) - flux(j - 1)) / h;
      if (f0) a(j) += f0(u(j));
    }
    return disc.analyze(a);
  };
  suite.noise = std::move(noise);
  suite.constants.alpha = p;
  suite.constants.beta = 4.0;
  suite.constants.theta = 0.5;
  suite.constants.rho.v_exponent = p;
  return suite;
}

VectorXd ns_advection(const Discretization& disc, const VectorXd& u, const VectorXd& v) {
  if (disc.domain() != DomainKind::torus2d || disc.components() != 2) {
    throw ConfigError("Navier-Stokes advection requires a two-component torus2d discretization");
  }
  const MatrixXd ug = disc.synthesize(u);
  const MatrixXd grad = disc.gradient(v);
  MatrixXd adv(ug.rows(), 2);
  for (int c = 0; c < 2; ++c) {
    adv.col(c) = ug.col(0).cwiseProduct(grad.col(c * 2)) + ug.col(1).cwiseProduct(grad.col(c * 2 + 1));
  }
  return -disc.divergence_free_part(disc.analyze(adv));
}

OperatorSuite ns2d_suite(const Discretization& disc, double viscosity, VectorXd forcing,
                         NoiseMaps noise) {
  if (disc.domain() != DomainKind::torus2d || disc.components() != 2) {
    throw ConfigError("ns2d_suite requires a two-component torus2d discretization");
  }
  if (!(viscosity > 0.0)) throw ParameterError("viscosity must be > 0");
  if (forcing.size() == 0) forcing = VectorXd::Zero(disc.dim());
  if (forcing.size() != disc.dim()) throw DimensionError("forcing does not match the discretization");
  forcing = disc.divergence_free_part(forcing);

  OperatorSuite suite;
  suite.name = "ns2d";
  suite.disc_id = disc.id();
  suite.linear_part = -viscosity * disc.stiffness();
  suite.nonlinear_part = [disc, forcing](double, const VectorXd& v) -> VectorXd {
    return ns_advection(disc, v, v) + forcing;
  };
  suite.noise = std::move(noise);
  suite.constants.alpha = 2.0;
  suite.constants.beta = 2.0;
  suite.constants.theta = viscosity;
  const double f_dual = disc.dual_norm_v2(forcing);
  suite.constants.F.constant = f_dual * f_dual / viscosity;
  suite.constants.rho = RhoForm{RhoForm::Kind::l4_quartic, 64.0 / std::pow(viscosity, 3), 2.0, 2.0};
  return suite;
}

StateVector leray_project(const Discretization& disc, const StateVector& field) {
  if (disc.domain() != DomainKind::torus2d || disc.components() != 2) {
    throw ConfigError("Leray projection requires a two-component torus2d discretization");
  }
  require_state(disc, field);
  return StateVector{disc.divergence_free_part(field.coeffs), disc.id()};
}

}  // namespace levyspde

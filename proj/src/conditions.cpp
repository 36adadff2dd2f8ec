#include "levyspde/conditions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "levyspde/errors.hpp"

namespace levyspde {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

std::string to_string(ConditionId id) {
  switch (id) {
    case ConditionId::H1:
      return "H1";
    case ConditionId::H2:
      return "H2";
    case ConditionId::H3:
      return "H3";
    case ConditionId::H4:
      return "H4";
    case ConditionId::C3:
      return "C3";
    case ConditionId::C4:
      return "C4";
    case ConditionId::C5:
      return "C5";
  }
  return "?";
}

void ConditionReport::record(double lhs, double rhs) {
  record_margin(rhs - lhs, 1.0 + std::abs(lhs) + std::abs(rhs));
}

void ConditionReport::record_margin(double margin, double scale) {
  if (samples_evaluated == 0 || margin < min_margin) min_margin = margin;
  ++samples_evaluated;
  margins.push_back(margin);
  if (!(margin >= -rel_tol * scale)) ++violations;
}

VectorXd sample_state(const Discretization& disc, const SamplingSpec& sampling, std::uint64_t index) {
  Rng rng = make_stream(sampling.seed, index, Stream::sampling);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const double r = sampling.radius * (1.0 - unif(rng));
  return random_band_limited(disc, sampling.decay, r, rng);
}

namespace {

/// Minimizes ‖v‖^p_{V,p} on the hyperplane ⟨w,v⟩ = 1.
class DualNormSolver {
 public:
  DualNormSolver(const Discretization& disc, double p) : disc_(disc), p_(p) {
    const Index dim = disc.dim();
    const Index grid = disc.grid_size();
    cols_ = disc.components() * disc.spatial_dims();
    derivative_ = MatrixXd(grid * cols_, dim);
    for (Index k = 0; k < dim; ++k) {
      const MatrixXd g = disc.gradient(VectorXd::Unit(dim, k));
      derivative_.col(k) = Eigen::Map<const VectorXd>(g.data(), g.size());
    }
    precond_ = disc.stiffness().cwiseInverse();
  }

  double operator()(const VectorXd& w) const {
    if (w.squaredNorm() == 0.0) return 0.0;
    VectorXd v = precond_.cwiseProduct(w);
    v /= w.dot(v);
    const VectorXd pw = precond_.cwiseProduct(w);
    const double wpw = w.dot(pw);
    double obj = objective(v);
    double step = 1.0;
    for (int it = 0; it < 400; ++it) {
      const VectorXd grad = gradient(v);
      VectorXd dir = -precond_.cwiseProduct(grad);
      dir -= (w.dot(dir) / wpw) * pw;  // keep ⟨w,v⟩ = 1
      const double slope = grad.dot(dir);
      if (!(slope < 0.0)) break;
      step = std::min(1.0, 2.0 * step);
      double trial_obj = objective(v + step * dir);
      while (trial_obj > obj + 1e-4 * step * slope && step > 1e-14) {
        step *= 0.5;
        trial_obj = objective(v + step * dir);
      }
      if (!(trial_obj < obj)) break;
      v += step * dir;
      const double drop = obj - trial_obj;
      obj = trial_obj;
      if (drop <= 1e-14 * obj) break;
    }
    return 1.0 / std::pow(obj, 1.0 / p_);
  }

 private:
  VectorXd magnitudes(const VectorXd& flat) const {
    const Index grid = disc_.grid_size();
    VectorXd sq = VectorXd::Zero(grid);
    for (Index c = 0; c < cols_; ++c) sq += flat.segment(c * grid, grid).cwiseAbs2();
    return sq.cwiseSqrt();
  }

  double objective(const VectorXd& v) const {
    const VectorXd mag = magnitudes(derivative_ * v);
    return (disc_.weights().array() * mag.array().pow(p_)).sum();
  }

  VectorXd gradient(const VectorXd& v) const {
    const Index grid = disc_.grid_size();
    const VectorXd flat = derivative_ * v;
    const VectorXd mag = magnitudes(flat);
    const VectorXd factor = p_ * (disc_.weights().array() * mag.array().pow(p_ - 2.0)).matrix();
    VectorXd weighted(flat.size());
    for (Index c = 0; c < cols_; ++c) {
      weighted.segment(c * grid, grid) = factor.cwiseProduct(flat.segment(c * grid, grid));
    }
    return derivative_.transpose() * weighted;
  }

  Discretization disc_;
  double p_;
  Index cols_ = 1;
  MatrixXd derivative_;
  VectorXd precond_;
};

double jump_square_sum(const OperatorSuite& suite, const std::vector<SmallAtom>& atoms, double t,
                       const VectorXd& v1, const VectorXd& v2) {
  double s = 0.0;
  for (const auto& atom : atoms) {
    s += atom.weight * (suite.small_jump(t, v1, atom.mark) - suite.small_jump(t, v2, atom.mark))
                           .squaredNorm();
  }
  return s;
}

ConditionReport make_report(ConditionId id, const SamplingSpec& sampling) {
  ConditionReport r;
  r.condition_id = id;
  r.sampling_spec = sampling;
  return r;
}

void require_suite(const OperatorSuite& suite, const Discretization& disc) {
  if (!(suite.disc_id == disc.id())) {
    throw DimensionError("operator suite '" + suite.name + "' was built for another discretization");
  }
}

/// Unit H-vector along coefficient k, made divergence-free for torus fields.
std::optional<VectorXd> probe_direction(const Discretization& disc, Index k) {
  VectorXd e = disc.divergence_free_part(VectorXd::Unit(disc.dim(), k));
  const double nrm = e.norm();
  if (nrm < 1e-12) return std::nullopt;
  return VectorXd(e / nrm);
}

}  // namespace

double dual_norm(const Discretization& disc, const VectorXd& w, double p) {
  if (w.size() != disc.dim()) throw DimensionError("dual norm: vector does not match discretization");
  if (p == 2.0) return disc.dual_norm_v2(w);
  if (!(p > 1.0)) throw ParameterError("dual norm requires p > 1");
  return DualNormSolver(disc, p)(w);
}

ConditionReport check_hemicontinuity(const OperatorSuite& suite, const Discretization& disc,
                                     int n_triples, int n_s_points, const SamplingSpec& sampling,
                                     double rel_tol) {
  require_suite(suite, disc);
  if (n_s_points < 3) throw ParameterError("hemicontinuity needs at least 3 s-points");
  ConditionReport report = make_report(ConditionId::H1, sampling);
  report.rel_tol = rel_tol;
  constexpr int levels = 4;
  const int fine = (n_s_points - 1) << (levels - 1);
  std::vector<double> phi(fine + 1);
  // Largest increment not explained by its neighbours, on the grid with stride `step`.
  auto spike = [&](int step) {
    const int cells = fine / step;
    auto inc = [&](int j) { return std::abs(phi[(j + 1) * step] - phi[j * step]); };
    double out = 0.0;
    for (int j = 0; j < cells; ++j) {
      const double left = j > 0 ? inc(j - 1) : 0.0;
      const double right = j + 1 < cells ? inc(j + 1) : 0.0;
      out = std::max(out, inc(j) - 2.0 * std::max(left, right));
    }
    return out;
  };
  for (int i = 0; i < n_triples; ++i) {
    const auto base = static_cast<std::uint64_t>(3 * i);
    const VectorXd v1 = sample_state(disc, sampling, base);
    const VectorXd v2 = sample_state(disc, sampling, base + 1);
    const VectorXd v = sample_state(disc, sampling, base + 2);
    double max_abs = 0.0;
    for (int j = 0; j <= fine; ++j) {
      const double s = -1.0 + 2.0 * j / fine;
      phi[j] = suite.drift(0.0, v1 + s * v2).dot(v);
      max_abs = std::max(max_abs, std::abs(phi[j]));
    }
    // A jump survives every refinement; a steep smooth stretch does not.
    double jump = spike(1);
    for (int l = 1; l < levels; ++l) jump = std::min(jump, spike(1 << l));
    report.record_margin(0.0 - jump, 1.0 + max_abs);
  }
  return report;
}

ConditionReport check_local_monotonicity(const OperatorSuite& suite, const Discretization& disc,
                                         int n_pairs, const SamplingSpec& sampling,
                                         double c_guess) {
  require_suite(suite, disc);
  ConditionReport report = make_report(ConditionId::H2, sampling);
  const auto& atoms = suite.noise.atoms;
  double calibrated = -std::numeric_limits<double>::infinity();

  auto evaluate = [&](const VectorXd& v1, const VectorXd& v2) {
    const VectorXd d = v1 - v2;
    const double d_sq = d.squaredNorm();
    const double lhs = 2.0 * (suite.drift(0.0, v1) - suite.drift(0.0, v2)).dot(d) +
                       (suite.diffusion(0.0, v1) - suite.diffusion(0.0, v2)).squaredNorm() +
                       jump_square_sum(suite, atoms, 0.0, v1, v2);
    const double rho = suite.constants.rho.evaluate(disc, v2);
    report.record(lhs, (c_guess + rho) * d_sq);
    if (d_sq > 0.0) calibrated = std::max(calibrated, (lhs - rho * d_sq) / d_sq);
  };

  int done = 0;
  if (sampling.probes) {
    const Index modes = std::min<Index>(4, disc.dim());
    const VectorXd zero = VectorXd::Zero(disc.dim());
    for (Index k = 0; k < modes && done < n_pairs; ++k) {
      const auto dir = probe_direction(disc, k);
      if (!dir) continue;
      for (double frac : {0.25, 0.5, 1.0}) {
        if (done >= n_pairs) break;
        evaluate(frac * sampling.radius * *dir, zero);
        ++done;
      }
    }
  }
  for (int i = 0; done < n_pairs; ++i, ++done) {
    const auto base = static_cast<std::uint64_t>(2 * i);
    evaluate(sample_state(disc, sampling, base), sample_state(disc, sampling, base + 1));
  }
  if (std::isfinite(calibrated)) report.calibrated_constant = calibrated;
  return report;
}

ConditionReport check_coercivity(const OperatorSuite& suite, const Discretization& disc,
                                 int n_samples, const SamplingSpec& sampling, double t) {
  require_suite(suite, disc);
  ConditionReport report = make_report(ConditionId::H3, sampling);
  const auto& k = suite.constants;
  const double F = k.F(t);
  double calibrated = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < n_samples; ++i) {
    const VectorXd v = sample_state(disc, sampling, static_cast<std::uint64_t>(i));
    const double h_sq = v.squaredNorm();
    const double lhs = 2.0 * suite.drift(t, v).dot(v) + suite.diffusion(t, v).squaredNorm() +
                       k.theta * std::pow(disc.v_norm(v, k.alpha), k.alpha);
    report.record(lhs, F + k.C * h_sq);
    if (h_sq > 0.0) calibrated = std::max(calibrated, (lhs - F) / h_sq);
  }
  if (std::isfinite(calibrated)) report.calibrated_constant = calibrated;
  return report;
}

ConditionReport check_growth(const OperatorSuite& suite, const Discretization& disc, int n_samples,
                             const SamplingSpec& sampling, double t) {
  require_suite(suite, disc);
  ConditionReport report = make_report(ConditionId::H4, sampling);
  const auto& k = suite.constants;
  const double F = k.F(t);
  const double exponent = k.alpha / (k.alpha - 1.0);
  std::optional<DualNormSolver> solver;
  if (k.alpha != 2.0) solver.emplace(disc, k.alpha);
  double calibrated = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < n_samples; ++i) {
    const VectorXd v = sample_state(disc, sampling, static_cast<std::uint64_t>(i));
    const VectorXd a = suite.drift(t, v);
    const double dual = solver ? (*solver)(a) : disc.dual_norm_v2(a);
    const double lhs = std::pow(dual, exponent);
    const double v_pow = std::pow(disc.v_norm(v, k.alpha), k.alpha);
    const double h_factor = 1.0 + std::pow(v.norm(), k.beta);
    report.record(lhs, (F + k.C * v_pow) * h_factor);
    if (v_pow > 0.0) calibrated = std::max(calibrated, (lhs / h_factor - F) / v_pow);
  }
  if (std::isfinite(calibrated)) report.calibrated_constant = calibrated;
  return report;
}

std::array<ConditionReport, 3> check_noise_conditions(const OperatorSuite& suite,
                                                      const LevyNoiseSpec& spec,
                                                      const Discretization& disc, int n_samples,
                                                      const SamplingSpec& sampling, double t) {
  require_suite(suite, disc);
  const auto& k = suite.constants;
  k.validate();
  const double F = k.F(t);
  const auto& atoms = spec.small_atoms();
  std::array<ConditionReport, 3> out{make_report(ConditionId::C3, sampling),
                                     make_report(ConditionId::C4, sampling),
                                     make_report(ConditionId::C5, sampling)};
  const double ninf = -std::numeric_limits<double>::infinity();
  std::array<double, 3> calibrated{ninf, ninf, ninf};
  const double q = k.beta + 2.0;
  for (int i = 0; i < n_samples; ++i) {
    const VectorXd v = sample_state(disc, sampling, static_cast<std::uint64_t>(i));
    const double h = v.norm();
    const double v_pow = std::pow(disc.v_norm(v, k.alpha), k.alpha);

    double jump_sq = 0.0;
    double jump_q = 0.0;
    for (const auto& atom : atoms) {
      const double fn = suite.small_jump(t, v, atom.mark).norm();
      jump_sq += atom.weight * fn * fn;
      jump_q += atom.weight * std::pow(fn, q);
    }

    const double lhs3 = suite.diffusion(t, v).squaredNorm() + jump_sq;
    out[0].record(lhs3, F + k.C * h * h + k.gamma * v_pow);
    if (h > 0.0) calibrated[0] = std::max(calibrated[0], (lhs3 - F - k.gamma * v_pow) / (h * h));

    const double hq = std::pow(h, q);
    out[1].record(jump_q, std::pow(F, q / 2.0) + k.C * hq);
    if (hq > 0.0) calibrated[1] = std::max(calibrated[1], (jump_q - std::pow(F, q / 2.0)) / hq);

    const double rho = k.rho.evaluate(disc, v);
    const double growth = (1.0 + v_pow) * (1.0 + std::pow(h, k.beta));
    out[2].record(rho, k.C * growth);
    calibrated[2] = std::max(calibrated[2], rho / growth);
  }
  for (int c = 0; c < 3; ++c) {
    if (std::isfinite(calibrated[c])) out[c].calibrated_constant = calibrated[c];
  }
  return out;
}

double estimate_dissipation_ratio(const OperatorSuite& suite, const Discretization& disc,
                                  int n_samples, const SamplingSpec& sampling) {
  require_suite(suite, disc);
  const double alpha = suite.constants.alpha;
  double ratio = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n_samples; ++i) {
    const VectorXd v = sample_state(disc, sampling, static_cast<std::uint64_t>(i));
    const double v_pow = std::pow(disc.v_norm(v, alpha), alpha);
    if (v_pow > 0.0) ratio = std::min(ratio, -2.0 * suite.drift(0.0, v).dot(v) / v_pow);
  }
  return ratio;
}

double p_laplace_delta_estimate(double p, int n_samples, std::uint64_t seed) {
  if (!(p >= 2.0)) throw ParameterError("flux monotonicity modulus needs p >= 2");
  auto flux = [p](double x) { return std::pow(std::abs(x), p - 2.0) * x; };
  auto ratio = [&](double x, double y) {
    return (flux(x) - flux(y)) * (x - y) / std::pow(std::abs(x - y), p);
  };
  double delta = ratio(1.0, -1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int i = 0; i < n_samples; ++i) {
    Rng rng = make_stream(seed, static_cast<std::uint64_t>(i), Stream::sampling);
    const double x = gauss(rng);
    const double y = gauss(rng);
    if (x != y) delta = std::min(delta, ratio(x, y));
  }
  return delta;
}

}  // namespace levyspde

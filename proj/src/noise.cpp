#include "levyspde/noise.hpp"

#include <cmath>
#include <limits>

#include "levyspde/errors.hpp"

namespace levyspde {

using Eigen::Index;
using Eigen::VectorXd;

LevyNoiseSpec::LevyNoiseSpec(int mark_dim, VectorXd wiener_amplitudes, std::vector<SmallAtom> atoms,
                             double large_rate, LargeMarkLaw large_marks)
    : mark_dim_(mark_dim),
      wiener_amplitudes_(std::move(wiener_amplitudes)),
      atoms_(std::move(atoms)),
      large_rate_(large_rate),
      large_marks_(large_marks) {
  if (mark_dim_ < 1) throw ConfigError("noise: mark dimension must be >= 1");
  if (!wiener_amplitudes_.allFinite()) throw ConfigError("noise: non-finite Wiener amplitude");
  if (!(large_rate_ >= 0.0) || !std::isfinite(large_rate_)) {
    throw ConfigError("noise: large-jump rate must be finite and >= 0");
  }
  for (std::size_t j = 0; j < atoms_.size(); ++j) {
    const auto& atom = atoms_[j];
    const std::string where = "noise: small atom " + std::to_string(j);
    if (!(atom.weight > 0.0) || !std::isfinite(atom.weight)) {
      throw ConfigError(where + " must have a finite weight > 0");
    }
    if (atom.mark.size() != mark_dim_) throw ConfigError(where + " has the wrong mark dimension");
    if (!atom.mark.allFinite() || atom.mark.norm() > 1.0) {
      throw ConfigError(where + " lies outside D^c = {|z| <= 1}");
    }
  }
  if (large_marks_.kind == LargeMarkLaw::Kind::fixed_radius && !(large_marks_.parameter > 1.0)) {
    throw ConfigError("noise: fixed large-mark radius must exceed 1");
  }
  if (large_marks_.kind == LargeMarkLaw::Kind::pareto && !(large_marks_.parameter > 0.0)) {
    throw ConfigError("noise: Pareto tail index must be > 0");
  }
}

double LevyNoiseSpec::small_second_moment() const {
  double s = 0.0;
  for (const auto& atom : atoms_) s += atom.weight * atom.mark.squaredNorm();
  return s;
}

std::vector<SmallAtom> discretize_radial_density(double tail_index, double eps, int bins,
                                                 double scale, int mark_dim) {
  if (!(eps > 0.0 && eps < 1.0)) throw ConfigError("radial density: need 0 < eps < 1");
  if (bins < 1) throw ConfigError("radial density: need at least one bin");
  if (!(tail_index > 0.0 && tail_index < 2.0)) {
    throw ConfigError("radial density: tail index must lie in (0, 2)");
  }
  if (!(scale > 0.0)) throw ConfigError("radial density: scale must be > 0");
  if (mark_dim < 1) throw ConfigError("radial density: mark dimension must be >= 1");

  const double a = tail_index;
  std::vector<SmallAtom> atoms;
  const double ratio = std::pow(1.0 / eps, 1.0 / bins);
  for (int b = 0; b < bins; ++b) {
    const double r0 = eps * std::pow(ratio, b);
    const double r1 = (b == bins - 1) ? 1.0 : r0 * ratio;
    const double mass = scale * (std::pow(r0, -a) - std::pow(r1, -a)) / a;
    const double second = scale * (std::pow(r1, 2.0 - a) - std::pow(r0, 2.0 - a)) / (2.0 - a);
    const double radius = std::min(1.0, std::sqrt(second / mass));
    const double share = mass / (2.0 * mark_dim);
    for (int axis = 0; axis < mark_dim; ++axis) {
      for (double sign : {1.0, -1.0}) {
        SmallAtom atom;
        atom.mark = VectorXd::Zero(mark_dim);
        atom.mark(axis) = sign * radius;
        atom.weight = share;
        atoms.push_back(std::move(atom));
      }
    }
  }
  return atoms;
}

VectorXd sample_wiener_increments(const LevyNoiseSpec& spec, double dt, Rng& rng) {
  if (!(dt > 0.0)) throw ParameterError("Wiener increments require dt > 0");
  std::normal_distribution<double> gauss(0.0, std::sqrt(dt));
  VectorXd out(spec.wiener_modes());
  for (Index i = 0; i < out.size(); ++i) out(i) = gauss(rng);
  return out;
}

namespace {

VectorXd sample_large_mark(const LevyNoiseSpec& spec, Rng& rng) {
  const int d = spec.mark_dim();
  VectorXd dir(d);
  if (d == 1) {
    dir(0) = std::bernoulli_distribution(0.5)(rng) ? 1.0 : -1.0;
  } else {
    std::normal_distribution<double> gauss(0.0, 1.0);
    do {
      for (int i = 0; i < d; ++i) dir(i) = gauss(rng);
    } while (dir.norm() == 0.0);
    dir.normalize();
  }
  const auto& law = spec.large_marks();
  double radius = law.parameter;
  if (law.kind == LargeMarkLaw::Kind::pareto) {
    // U in (0,1] so the radius is >= 1; redraw the measure-zero boundary case.
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    do {
      radius = std::pow(1.0 - unif(rng), -1.0 / law.parameter);
    } while (!(radius > 1.0) || !std::isfinite(radius));
  }
  return radius * dir;
}

}  // namespace

std::vector<JumpEvent> sample_large_jump_times(const LevyNoiseSpec& spec, double horizon, Rng& rng) {
  if (!(horizon > 0.0)) throw ParameterError("large-jump sampling requires T > 0");
  std::vector<JumpEvent> events;
  if (spec.large_rate() == 0.0) return events;
  std::exponential_distribution<double> gap(spec.large_rate());
  double t = 0.0;
  while (true) {
    const double next = t + gap(rng);
    if (next > horizon) break;
    if (next <= t) continue;  // exponential draw of exactly 0
    t = next;
    JumpEvent ev;
    ev.time = t;
    ev.kind = JumpEvent::Kind::large;
    ev.mark = sample_large_mark(spec, rng);
    events.push_back(std::move(ev));
  }
  return events;
}

std::vector<int> sample_small_jump_counts(const LevyNoiseSpec& spec, double dt, Rng& rng) {
  if (!(dt > 0.0)) throw ParameterError("small-jump counts require dt > 0");
  std::vector<int> counts(spec.small_atoms().size());
  for (std::size_t j = 0; j < counts.size(); ++j) {
    std::poisson_distribution<int> poisson(spec.small_atoms()[j].weight * dt);
    counts[j] = poisson(rng);
  }
  return counts;
}

VectorXd compensated_increment(const MarkFunction& f, std::span<const int> counts,
                               const LevyNoiseSpec& spec, double dt, Index state_dim) {
  const auto& atoms = spec.small_atoms();
  if (counts.size() != atoms.size()) {
    throw DimensionError("compensated increment: one count per atom required");
  }
  VectorXd out = VectorXd::Zero(state_dim);
  for (std::size_t j = 0; j < atoms.size(); ++j) {
    const VectorXd value = f(atoms[j].mark);
    if (value.size() != state_dim) {
      throw DimensionError("compensated increment: integrand has the wrong dimension");
    }
    out += (counts[j] - atoms[j].weight * dt) * value;
  }
  return out;
}

IsometryResult verify_isometry(const LevyNoiseSpec& spec, const MarkFunction& f, double horizon,
                               int n_steps, int paths, std::uint64_t seed) {
  if (!(horizon > 0.0) || n_steps < 1 || paths < 2) {
    throw ParameterError("isometry check needs T > 0, n_steps >= 1 and at least two paths");
  }
  const auto& atoms = spec.small_atoms();
  std::vector<VectorXd> values;
  values.reserve(atoms.size());
  Index dim = -1;
  for (const auto& atom : atoms) {
    values.push_back(f(atom.mark));
    if (dim >= 0 && values.back().size() != dim) {
      throw DimensionError("isometry: integrand dimension varies across atoms");
    }
    dim = values.back().size();
  }
  if (dim < 0) dim = 1;
  IsometryResult res;
  res.paths = paths;
  for (std::size_t j = 0; j < atoms.size(); ++j) {
    res.analytic += horizon * atoms[j].weight * values[j].squaredNorm();
  }

  const double dt = horizon / n_steps;
  double sum = 0.0;
  double sum_sq = 0.0;
  VectorXd mean = VectorXd::Zero(dim);
  VectorXd mean_sq = VectorXd::Zero(dim);
  for (int path = 0; path < paths; ++path) {
    Rng rng = make_stream(seed, static_cast<std::uint64_t>(path), Stream::isometry);
    VectorXd integral = VectorXd::Zero(dim);
    for (int s = 0; s < n_steps; ++s) {
      const auto counts = sample_small_jump_counts(spec, dt, rng);
      for (std::size_t j = 0; j < atoms.size(); ++j) {
        integral += (counts[j] - atoms[j].weight * dt) * values[j];
      }
    }
    const double sq = integral.squaredNorm();
    sum += sq;
    sum_sq += sq * sq;
    mean += integral;
    mean_sq += integral.cwiseAbs2();
  }
  const double m = static_cast<double>(paths);
  res.mc_second_moment = sum / m;
  const double var = std::max(0.0, (sum_sq / m - res.mc_second_moment * res.mc_second_moment)) *
                     m / (m - 1.0);
  res.standard_error = std::sqrt(var / m);
  if (res.standard_error > 0.0) {
    res.z_score = (res.mc_second_moment - res.analytic) / res.standard_error;
  } else {
    res.z_score = res.mc_second_moment == res.analytic
                      ? 0.0
                      : std::numeric_limits<double>::infinity();
  }
  mean /= m;
  for (Index i = 0; i < dim; ++i) {
    const double v = std::max(0.0, mean_sq(i) / m - mean(i) * mean(i)) * m / (m - 1.0);
    const double se = std::sqrt(v / m);
    if (se > 0.0) res.max_mean_z = std::max(res.max_mean_z, std::abs(mean(i)) / se);
  }
  return res;
}

}  // namespace levyspde

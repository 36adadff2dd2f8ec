#include "levyspde/solver.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>

#include "levyspde/errors.hpp"

namespace levyspde {

using Eigen::Index;
using Eigen::VectorXd;

std::string to_string(Scheme scheme) {
  switch (scheme) {
    case Scheme::explicit_euler:
      return "explicit_euler";
    case Scheme::semi_implicit:
      return "semi_implicit";
    case Scheme::exponential:
      return "exponential";
  }
  return "?";
}

Scheme scheme_from_string(const std::string& name) {
  if (name == "explicit_euler") return Scheme::explicit_euler;
  if (name == "semi_implicit") return Scheme::semi_implicit;
  if (name == "exponential") return Scheme::exponential;
  throw ConfigError("unknown scheme '" + name + "'");
}

void SolverConfig::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("solver.dt must be finite and > 0");
  if (!(T > 0.0) || !std::isfinite(T)) throw ConfigError("solver.T must be finite and > 0");
  if (dt > T) throw ConfigError("solver.dt must not exceed solver.T");
  if (!(blowup_radius > 0.0)) throw ConfigError("solver.blowup_radius must be > 0");
  if (record_stride < 1) throw ConfigError("solver.record_stride must be >= 1");
}

int SolverConfig::steps() const {
  return static_cast<int>(std::ceil(T / dt - 1e-9));
}

double SolverConfig::time_at(int step) const {
  return step >= steps() ? T : step * dt;
}

int snapped_step(double tau, const SolverConfig& config) {
  const int k = static_cast<int>(std::floor(tau / config.dt + 1e-12));
  return std::clamp(k, 0, config.steps());
}

VectorXd galerkin_step(const OperatorSuite& suite, const Discretization& disc, const VectorXd& state,
                       double t, double dt, const VectorXd& wiener_incr,
                       std::span<const int> small_counts, const LevyNoiseSpec& spec,
                       Scheme scheme) {
  if (state.size() != disc.dim() || suite.linear_part.size() != disc.dim()) {
    throw DimensionError("galerkin_step: state does not match the discretization");
  }
  if (wiener_incr.size() != suite.noise.wiener_modes) {
    throw DimensionError("galerkin_step: one Wiener increment per mode required");
  }
  VectorXd rest = state + dt * suite.nonlinear_part(t, state);
  if (wiener_incr.size() > 0) rest += suite.diffusion(t, state) * wiener_incr;
  if (!spec.small_atoms().empty()) {
    rest += compensated_increment(
        [&](const VectorXd& z) { return suite.small_jump(t, state, z); }, small_counts, spec, dt,
        disc.dim());
  }
  const auto& L = suite.linear_part.array();
  switch (scheme) {
    case Scheme::explicit_euler:
      return rest + dt * (L * state.array()).matrix();
    case Scheme::semi_implicit:
      return (rest.array() / (1.0 - dt * L)).matrix();
    case Scheme::exponential:
      return ((dt * L).exp() * rest.array()).matrix();
  }
  return rest;
}

namespace {

class PathDriver {
 public:
  PathDriver(const OperatorSuite& suite, const Discretization& disc, const LevyNoiseSpec& spec,
             const SolverConfig& config, std::uint64_t seed, std::uint64_t index)
      : suite_(suite), disc_(disc), spec_(spec), config_(config),
        rng_(make_stream(seed, index, Stream::step_noise)) {
    config.validate();
    if (!(suite.disc_id == disc.id())) {
      throw DimensionError("operator suite '" + suite.name + "' was built for another discretization");
    }
    if (spec.wiener_modes() != suite.noise.wiener_modes) {
      throw ConfigError("noise spec and suite disagree on the number of Wiener modes");
    }
    record_.seed = seed;
    record_.index = index;
  }

  /// Returns false once the guard has fired.
  bool start(const VectorXd& x0) {
    if (x0.size() != disc_.dim()) throw DimensionError("initial state does not match the discretization");
    state_ = x0;
    return guard_and_record(0, true);
  }

  /// Steps from the current step to `until`; false if the path blew up.
  bool advance(int until) {
    const int last = config_.steps();
    const double beta = suite_.constants.beta;
    const double alpha = suite_.constants.alpha;
    while (step_ < until) {
      const double t = config_.time_at(step_);
      const double h = config_.time_at(step_ + 1) - t;
      const VectorXd dw = sample_wiener_increments(spec_, h, rng_);
      const auto counts = sample_small_jump_counts(spec_, h, rng_);
      record_.energy_integral +=
          std::pow(state_.norm(), beta) * std::pow(disc_.v_norm(state_, alpha), alpha) * h;
      state_ = galerkin_step(suite_, disc_, state_, t, h, dw, counts, spec_, config_.scheme);
      ++step_;
      const bool keep = step_ % config_.record_stride == 0 || step_ == last;
      if (!guard_and_record(step_, keep)) return false;
    }
    return true;
  }

  /// Applies X = X_− + g(t, X_−, mark) at the current grid time.
  bool apply_jump(const JumpEvent& event) {
    const double t = config_.time_at(step_);
    state_ += suite_.large_jump(t, state_, event.mark);
    record_.jumps.push_back(event);
    record_.jump_grid_times.push_back(t);
    return guard_and_record(step_, true, true);
  }

  int step() const { return step_; }

  TrajectoryRecord finish() {
    record_.final_state = state_;
    return std::move(record_);
  }

 private:
  bool guard_and_record(int step, bool keep, bool replace = false) {
    const double t = config_.time_at(step);
    const bool finite = state_.allFinite();
    const double nh = finite ? state_.norm() : std::numeric_limits<double>::infinity();
    const bool blown = !finite || nh > config_.blowup_radius;
    if (keep || blown) {
      const double nv = finite ? disc_.v_norm(state_, suite_.constants.alpha)
                               : std::numeric_limits<double>::infinity();
      // A jump at an already recorded grid time replaces the pre-jump entry (càdlàg value).
      if (replace && !record_.times.empty() && record_.times.back() == t) {
        record_.norm_h.back() = nh;
        record_.norm_v.back() = nv;
        if (config_.record_coefficients) record_.states.back() = state_;
      } else {
        record_.times.push_back(t);
        record_.norm_h.push_back(nh);
        record_.norm_v.push_back(nv);
        if (config_.record_coefficients) record_.states.push_back(state_);
      }
    }
    if (blown) {
      record_.blown_up = true;
      record_.blowup_time = t;
    }
    return !blown;
  }

  const OperatorSuite& suite_;
  const Discretization& disc_;
  const LevyNoiseSpec& spec_;
  const SolverConfig& config_;
  Rng rng_;
  VectorXd state_;
  int step_ = 0;
  TrajectoryRecord record_;
};

}  // namespace

TrajectoryRecord solve_path_small(const OperatorSuite& suite, const Discretization& disc,
                                  const LevyNoiseSpec& spec, const SolverConfig& config,
                                  const VectorXd& x0, std::uint64_t master_seed,
                                  std::uint64_t index) {
  PathDriver driver(suite, disc, spec, config, master_seed, index);
  if (driver.start(x0)) driver.advance(config.steps());
  return driver.finish();
}

TrajectoryRecord solve_path_interlaced(const OperatorSuite& suite, const Discretization& disc,
                                       const LevyNoiseSpec& spec, const SolverConfig& config,
                                       const VectorXd& x0, std::uint64_t master_seed,
                                       std::uint64_t index,
                                       const std::vector<JumpEvent>* schedule) {
  std::vector<JumpEvent> sampled;
  if (!schedule) {
    if (spec.large_rate() > 0.0) {
      Rng rng = make_stream(master_seed, index, Stream::large_jumps);
      sampled = sample_large_jump_times(spec, config.T, rng);
    }
    schedule = &sampled;
  }
  for (std::size_t i = 1; i < schedule->size(); ++i) {
    if (!((*schedule)[i].time >= (*schedule)[i - 1].time)) {
      throw ParameterError("jump schedule must be sorted by time");
    }
  }

  PathDriver driver(suite, disc, spec, config, master_seed, index);
  if (!driver.start(x0)) return driver.finish();
  // Solve on [τ_m, τ_{m+1}) from the post-jump state, then jump.
  for (const auto& event : *schedule) {
    if (event.time > config.T) break;
    if (!driver.advance(snapped_step(event.time, config))) return driver.finish();
    if (!driver.apply_jump(event)) return driver.finish();
  }
  driver.advance(config.steps());
  return driver.finish();
}

double pairwise_sum(std::span<const double> values) {
  if (values.size() <= 8) {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

namespace {

struct MeanSe {
  double mean = 0.0;
  double se = 0.0;
};

MeanSe mean_and_se(const std::vector<double>& xs) {
  MeanSe out;
  if (xs.empty()) return out;
  const double n = static_cast<double>(xs.size());
  out.mean = pairwise_sum(xs) / n;
  if (xs.size() < 2) return out;
  std::vector<double> dev(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) dev[i] = (xs[i] - out.mean) * (xs[i] - out.mean);
  out.se = std::sqrt(pairwise_sum(dev) / (n - 1.0) / n);
  return out;
}

}  // namespace

MomentReport ensemble_moments(const OperatorSuite& suite, const Discretization& disc,
                              const LevyNoiseSpec& spec, const SolverConfig& config,
                              const InitialLaw& x0_law, int M, std::uint64_t master_seed,
                              int threads) {
  if (!suite.g_is_zero()) {
    throw RefusalError(
        "moment estimate refused: the bound on sup_t E|X_t|_H^(beta+2) + E int |X|_H^beta |X|_V^alpha dt "
        "holds under the hypothesis g = 0 (no large jumps), but suite '" + suite.name +
        "' has a non-zero large-jump map g");
  }
  if (M < 1) throw ParameterError("ensemble size M must be >= 1");
  config.validate();
  threads = std::max(1, std::min(threads, M));

  std::vector<TrajectoryRecord> records(M);
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    while (true) {
      const int i = next.fetch_add(1);
      if (i >= M) return;
      try {
        Rng init = make_stream(master_seed, static_cast<std::uint64_t>(i), Stream::initial_state);
        const VectorXd x0 = x0_law(init);
        TrajectoryRecord rec =
            solve_path_small(suite, disc, spec, config, x0, master_seed, static_cast<std::uint64_t>(i));
        rec.states.clear();
        records[i] = std::move(rec);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(M);
        return;
      }
    }
  };
  {
    std::vector<std::jthread> pool;
    for (int w = 1; w < threads; ++w) pool.emplace_back(worker);
    worker();
  }
  if (failure) std::rethrow_exception(failure);

  MomentReport report;
  report.p = suite.constants.beta + 2.0;
  report.ensemble_size = M;
  std::vector<int> kept;
  for (int i = 0; i < M; ++i) {
    if (records[i].blown_up) {
      ++report.blown_up;
    } else {
      kept.push_back(i);
    }
  }
  report.blowup_fraction = static_cast<double>(report.blown_up) / M;
  if (kept.empty()) {
    report.sup_mean = report.energy_mean = std::numeric_limits<double>::quiet_NaN();
    return report;
  }
  report.times = records[kept.front()].times;
  std::vector<double> column(kept.size());
  report.sup_mean = -1.0;
  for (std::size_t k = 0; k < report.times.size(); ++k) {
    for (std::size_t j = 0; j < kept.size(); ++j) {
      column[j] = std::pow(records[kept[j]].norm_h[k], report.p);
    }
    const MeanSe ms = mean_and_se(column);
    report.mean_curve.push_back(ms.mean);
    if (ms.mean > report.sup_mean) {
      report.sup_mean = ms.mean;
      report.sup_standard_error = ms.se;
      report.sup_time = report.times[k];
    }
  }
  for (std::size_t j = 0; j < kept.size(); ++j) column[j] = records[kept[j]].energy_integral;
  const MeanSe energy = mean_and_se(column);
  report.energy_mean = energy.mean;
  report.energy_standard_error = energy.se;
  return report;
}

ConvergenceTable convergence_study(const SuiteFactory& family, DomainKind domain, int components,
                                   const LevyNoiseSpec& spec, const SolverConfig& config,
                                   const StateFactory& x0, const std::vector<int>& n_list,
                                   int reference_n, std::uint64_t master_seed) {
  if (n_list.empty()) throw ParameterError("convergence study needs at least one n");
  for (int n : n_list) {
    if (n > reference_n) throw ParameterError("convergence study: every n must be <= the reference n");
  }
  const Discretization ref_disc = build_discretization(domain, reference_n, components);
  const OperatorSuite ref_suite = family(ref_disc);
  const VectorXd ref_x0 = x0(ref_disc);
  const TrajectoryRecord ref =
      solve_path_interlaced(ref_suite, ref_disc, spec, config, ref_x0, master_seed, 0);

  ConvergenceTable table;
  table.reference_n = reference_n;
  table.any_blown_up = ref.blown_up;
  for (int n : n_list) {
    const Discretization disc = build_discretization(domain, n, components);
    const OperatorSuite suite = family(disc);
    const VectorXd start = project(ref_disc, ref_x0, n).coeffs.head(disc.dim());
    const TrajectoryRecord run =
        solve_path_interlaced(suite, disc, spec, config, start, master_seed, 0);
    table.any_blown_up = table.any_blown_up || run.blown_up;
    table.n.push_back(n);
    table.error.push_back((embed(disc, run.final_state, ref_disc) - ref.final_state).norm());
  }
  for (std::size_t i = 0; i + 1 < table.error.size(); ++i) {
    table.ratio.push_back(table.error[i + 1] > 0.0 ? table.error[i] / table.error[i + 1]
                                                   : std::numeric_limits<double>::infinity());
  }
  return table;
}

StabilityTable stability_check(const OperatorSuite& suite, const Discretization& disc,
                               const LevyNoiseSpec& spec, const SolverConfig& config,
                               const VectorXd& x0, const VectorXd& y0, std::uint64_t master_seed,
                               double c_hat) {
  SolverConfig cfg = config;
  cfg.record_stride = 1;
  cfg.record_coefficients = true;
  const TrajectoryRecord xs = solve_path_interlaced(suite, disc, spec, cfg, x0, master_seed, 0);
  const TrajectoryRecord ys = solve_path_interlaced(suite, disc, spec, cfg, y0, master_seed, 0);

  StabilityTable table;
  table.any_blown_up = xs.blown_up || ys.blown_up;
  const std::size_t count = std::min(xs.states.size(), ys.states.size());
  double discount = 0.0;
  int nonincreasing = 0;
  for (std::size_t k = 0; k < count; ++k) {
    if (k > 0) {
      const double h = xs.times[k] - xs.times[k - 1];
      discount += (c_hat + suite.constants.rho.evaluate(disc, ys.states[k - 1])) * h;
    }
    const double m = (xs.states[k] - ys.states[k]).squaredNorm();
    table.times.push_back(xs.times[k]);
    table.m.push_back(m);
    table.d.push_back(std::exp(-discount) * m);
    if (k > 0 && table.d[k] <= 1.05 * table.d[k - 1]) ++nonincreasing;
  }
  if (count > 1) table.nonincreasing_fraction = static_cast<double>(nonincreasing) / (count - 1);
  return table;
}

}  // namespace levyspde

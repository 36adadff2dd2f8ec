#include "levyspde/commands.hpp"

#include <filesystem>
#include <fstream>
#include <thread>

#include "levyspde/conditions.hpp"
#include "levyspde/errors.hpp"
#include "levyspde/report_io.hpp"
#include "levyspde/solver.hpp"

#ifndef LEVYSPDE_VERSION
#define LEVYSPDE_VERSION "0.0.0"
#endif

namespace levyspde {

namespace fs = std::filesystem;
using Eigen::VectorXd;

const char* version_string() { return LEVYSPDE_VERSION; }

namespace {

void write_provenance(const fs::path& dir, const ExperimentConfig& cfg, const CommandOptions& opt) {
  fs::create_directories(dir);
  {
    std::ofstream out(dir / "resolved_config.json", std::ios::binary);
    out << cfg.resolved.dump(2) << '\n';
  }
  KeyValueReport prov;
  prov.add("version", std::string(version_string()));
  prov.add("subcommand", opt.subcommand);
  prov.add("experiment", cfg.experiment);
  prov.add("seed", std::to_string(cfg.seed));
  prov.add("config_file", fs::path(opt.config_path).filename().string());
  prov.write(dir / "provenance.txt");
}

int cmd_run(const ExperimentConfig& cfg, const fs::path& dir, std::ostream& out) {
  const Experiment ex = build_experiment(cfg);
  const TrajectoryRecord rec =
      solve_path_interlaced(ex.suite, ex.disc, ex.spec, cfg.solver, ex.x0, cfg.seed, 0);
  write_trajectory_csv(dir / "trajectory.csv", rec);
  KeyValueReport summary;
  summary.section("run");
  summary.add("steps", cfg.solver.steps());
  summary.add("recorded", static_cast<int>(rec.times.size()));
  summary.add("large_jumps", static_cast<int>(rec.jumps.size()));
  summary.add("blown_up", rec.blown_up);
  summary.add("blowup_time", rec.blown_up ? format_double(rec.blowup_time) : std::string("n/a"));
  summary.add("final_norm_H", rec.norm_h.back());
  summary.add("final_norm_V", rec.norm_v.back());
  summary.write(dir / "run_summary.txt");
  summary.write(out);
  return rec.blown_up ? exit_blowup : exit_ok;
}

int cmd_verify(const ExperimentConfig& cfg, const fs::path& dir, std::ostream& out) {
  const Experiment ex = build_experiment(cfg);
  SamplingSpec sampling;
  sampling.radius = cfg.verify.radius;
  sampling.decay = cfg.verify.decay;
  sampling.seed = cfg.seed;

  std::vector<ConditionReport> reports;
  reports.push_back(check_hemicontinuity(ex.suite, ex.disc, cfg.verify.triples, cfg.verify.s_points,
                                         sampling, cfg.verify.h1_rel_tol));
  reports.push_back(check_local_monotonicity(ex.suite, ex.disc, cfg.verify.pairs, sampling,
                                             ex.suite.constants.C));
  reports.push_back(check_coercivity(ex.suite, ex.disc, cfg.verify.samples, sampling));
  reports.push_back(check_growth(ex.suite, ex.disc, cfg.verify.samples, sampling));
  for (auto& r : check_noise_conditions(ex.suite, ex.spec, ex.disc, cfg.verify.samples, sampling)) {
    reports.push_back(std::move(r));
  }

  KeyValueReport kv;
  int total = 0;
  for (const auto& r : reports) {
    append_report(kv, r);
    total += r.violations;
  }
  kv.section("summary");
  kv.add("declared_C", ex.suite.constants.C);
  kv.add("rho", ex.suite.constants.rho.describe());
  kv.add("total_violations", total);
  kv.write(dir / "conditions.txt");
  for (const auto& r : reports) {
    out << to_string(r.condition_id) << ": samples=" << r.samples_evaluated
        << " min_margin=" << format_double(r.min_margin) << " violations=" << r.violations << '\n';
  }
  out << "total_violations = " << total << '\n';
  return exit_ok;
}

int cmd_converge(const ExperimentConfig& cfg, const fs::path& dir, std::ostream& out) {
  const LevyNoiseSpec spec = build_noise_spec(cfg);
  const ConvergenceTable table = convergence_study(
      [&](const Discretization& d) { return build_suite(cfg, d, spec); }, cfg.domain, cfg.components,
      spec, cfg.solver, [&](const Discretization& d) { return build_profile(d, cfg.initial); },
      cfg.converge.n_list, cfg.converge.reference_n, cfg.seed);
  KeyValueReport kv;
  kv.section("convergence");
  kv.add("reference_n", table.reference_n);
  kv.add("any_blown_up", table.any_blown_up);
  for (std::size_t i = 0; i < table.n.size(); ++i) {
    kv.add("error.n" + std::to_string(table.n[i]), table.error[i]);
  }
  for (std::size_t i = 0; i < table.ratio.size(); ++i) {
    kv.add("ratio.n" + std::to_string(table.n[i]) + "_n" + std::to_string(table.n[i + 1]),
           table.ratio[i]);
  }
  kv.write(dir / "convergence.txt");
  kv.write(out);
  return exit_ok;
}

int cmd_moments(const ExperimentConfig& cfg, const fs::path& dir, std::ostream& out, int threads) {
  const Experiment ex = build_experiment(cfg);
  const VectorXd x0 = ex.x0;
  const MomentReport report = ensemble_moments(ex.suite, ex.disc, ex.spec, cfg.solver,
                                               [x0](Rng&) { return x0; }, cfg.ensemble_M, cfg.seed,
                                               threads);
  KeyValueReport kv;
  append_report(kv, report);
  kv.write(dir / "moments.txt");
  kv.write(out);
  std::ofstream csv(dir / "moments_curve.csv", std::ios::binary);
  csv << "t,mean_norm_p\n";
  for (std::size_t k = 0; k < report.times.size(); ++k) {
    csv << format_double(report.times[k]) << ',' << format_double(report.mean_curve[k]) << '\n';
  }
  return exit_ok;
}

int cmd_stability(const ExperimentConfig& cfg, const fs::path& dir, std::ostream& out) {
  const Experiment ex = build_experiment(cfg);
  const VectorXd y0 = build_profile(ex.disc, cfg.stability.y0);
  const double c_hat = cfg.stability.c_hat.value_or(ex.suite.constants.C);
  const StabilityTable table =
      stability_check(ex.suite, ex.disc, ex.spec, cfg.solver, ex.x0, y0, cfg.seed, c_hat);
  {
    std::ofstream csv(dir / "stability.csv", std::ios::binary);
    csv << "t,m,d\n";
    for (std::size_t k = 0; k < table.times.size(); ++k) {
      csv << format_double(table.times[k]) << ',' << format_double(table.m[k]) << ','
          << format_double(table.d[k]) << '\n';
    }
  }
  KeyValueReport kv;
  kv.section("stability");
  kv.add("c_hat", c_hat);
  kv.add("rho", ex.suite.constants.rho.describe());
  kv.add("steps", static_cast<int>(table.times.size()) - 1);
  kv.add("m_initial", table.m.front());
  kv.add("m_final", table.m.back());
  kv.add("d_final", table.d.back());
  kv.add("d_nonincreasing_fraction", table.nonincreasing_fraction);
  kv.add("any_blown_up", table.any_blown_up);
  kv.write(dir / "stability.txt");
  kv.write(out);
  return exit_ok;
}

}  // namespace

int run_command(const CommandOptions& options, std::ostream& out, std::ostream& err) {
  try {
    const ExperimentConfig cfg = load_config(options.config_path, options.overrides);
    const fs::path dir = cfg.output_dir;
    write_provenance(dir, cfg, options);
    int threads = options.threads.value_or(static_cast<int>(std::thread::hardware_concurrency()));
    if (threads < 1) threads = 1;
    const std::string& sub = options.subcommand;
    if (sub == "run") return cmd_run(cfg, dir, out);
    if (sub == "verify") return cmd_verify(cfg, dir, out);
    if (sub == "converge") return cmd_converge(cfg, dir, out);
    if (sub == "moments") return cmd_moments(cfg, dir, out, threads);
    if (sub == "stability") return cmd_stability(cfg, dir, out);
    err << "error: usage: unknown subcommand '" << sub << "'\n";
    return exit_failure;
  } catch (const RefusalError& e) {
    err << "error: refusal: " << e.what() << '\n';
    return exit_refusal;
  } catch (const ConfigError& e) {
    err << "error: config: " << e.what() << '\n';
    return exit_config_error;
  } catch (const std::invalid_argument& e) {
    err << "error: config: " << e.what() << '\n';
    return exit_config_error;
  } catch (const std::exception& e) {
    err << "error: runtime: " << e.what() << '\n';
    return exit_failure;
  }
}

}  // namespace levyspde

#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "levyspde/noise.hpp"
#include "levyspde/operators.hpp"
#include "levyspde/solver.hpp"
#include "levyspde/spaces.hpp"

namespace levyspde {

struct ProfileSpec {
  std::string profile = "sine";
  double amplitude = 1.0;
  int mode = 1;
};

struct OperatorSpec {
  std::string kind = "burgers";
  std::string f_kind = "zero";  // zero | identity | tanh
  double f_scale = 1.0;
  std::string f0_kind = "zero";  // zero | cubic: −x³ + c1 x² + c2 x
  double f0_c1 = 0.0;
  double f0_c2 = 0.0;
  double p = 3.0;
  double viscosity = 1.0;
  ProfileSpec forcing{"zero", 0.0, 1};
};

/// Values that replace the suite's built-in constants when present.
struct ConstantOverrides {
  std::optional<double> alpha, beta, theta, C, gamma, F;
  std::optional<std::string> rho_kind;
  std::optional<double> rho_c, rho_power;
};

struct NoiseConfig {
  std::vector<double> wiener_amplitudes;
  double b_scale = 0.0;
  std::vector<SmallAtom> atoms;
  int mark_dim = 1;
  double f_scale = 0.0;
  JumpProfile h = JumpProfile::min_norm;
  double large_rate = 0.0;
  LargeMarkLaw large_law;
  LargeJumpMap::Kind g_kind = LargeJumpMap::Kind::zero;
  double g_scale = 0.0;
  ProfileSpec g_profile;
};

struct VerifySettings {
  int samples = 200;
  int pairs = 200;
  int triples = 20;
  int s_points = 17;
  double radius = 1.0;
  double decay = 1.0;
  double h1_rel_tol = 1e-8;
};

struct ConvergeSettings {
  std::vector<int> n_list{8, 16};
  int reference_n = 32;
};

struct StabilitySettings {
  ProfileSpec y0{"sine", 0.5, 1};
  std::optional<double> c_hat;
};

struct ExperimentConfig {
  std::string experiment = "unnamed";
  std::uint64_t seed = 0;
  std::string output_dir = "out";
  DomainKind domain = DomainKind::interval_dirichlet;
  int n = 32;
  int components = 1;
  OperatorSpec op;
  ConstantOverrides constants;
  NoiseConfig noise;
  SolverConfig solver;
  ProfileSpec initial;
  int ensemble_M = 100;
  VerifySettings verify;
  ConvergeSettings converge;
  StabilitySettings stability;
  /// The configuration with every default filled in, as echoed to output directories.
  nlohmann::json resolved;
};

/// Command-line values that take precedence over the file.
struct ConfigOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<int> n;
  std::optional<double> dt;
  std::optional<std::string> output_dir;
};

/// Reads and validates a JSON experiment file. Parse errors carry line and
/// column; validation errors name the offending key (e.g. "solver.dt").
ExperimentConfig load_config(const std::string& path, const ConfigOverrides& overrides = {});
ExperimentConfig parse_config(const nlohmann::json& doc, const ConfigOverrides& overrides = {});

LevyNoiseSpec build_noise_spec(const ExperimentConfig& config);
/// The configured suite on `disc`, with constant overrides applied and validated.
OperatorSuite build_suite(const ExperimentConfig& config, const Discretization& disc,
                          const LevyNoiseSpec& spec);
Eigen::VectorXd build_profile(const Discretization& disc, const ProfileSpec& profile);

struct Experiment {
  Discretization disc;
  LevyNoiseSpec spec;
  OperatorSuite suite;
  Eigen::VectorXd x0;
};
Experiment build_experiment(const ExperimentConfig& config);

}  // namespace levyspde

#include "levyspde/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "levyspde/errors.hpp"

namespace levyspde {

using Eigen::VectorXd;
using nlohmann::json;

namespace {

const json& defaults() {
  static const json d = json::parse(R"({
    "experiment": "unnamed",
    "seed": 0,
    "output_dir": "out",
    "discretization": {"domain": "interval_dirichlet", "n": 32, "components": null},
    "operator": {
      "kind": "burgers",
      "f": {"kind": "zero", "scale": 1.0},
      "f0": {"kind": "zero", "c1": 0.0, "c2": 0.0},
      "p": 3.0,
      "viscosity": 1.0,
      "forcing": {"profile": "zero", "amplitude": 0.0, "mode": 1}
    },
    "constants": {
      "alpha": null, "beta": null, "theta": null, "C": null, "gamma": null, "F": null,
      "rho": {"kind": null, "c": null, "power": null}
    },
    "noise": {
      "wiener": {"modes": 0, "amplitude": 0.0, "amplitudes": null, "b_scale": 0.0},
      "small_jumps": {"atoms": [], "radial": null, "f_scale": 0.0, "h": "min_norm", "mark_dim": 1},
      "large": {
        "rate": 0.0, "law": "pareto", "parameter": 2.0,
        "g": {"kind": "zero", "scale": 0.0, "profile": "sine", "amplitude": 1.0, "mode": 1}
      }
    },
    "solver": {"dt": null, "T": null, "scheme": "semi_implicit", "blowup_radius": 1e6,
               "record_stride": 1, "record_coefficients": false},
    "initial": {"profile": "sine", "amplitude": 1.0, "mode": 1},
    "ensemble": {"M": 100},
    "verify": {"samples": 200, "pairs": 200, "triples": 20, "s_points": 17,
               "radius": 1.0, "decay": 1.0, "h1_rel_tol": 1e-8},
    "converge": {"n_list": [8, 16], "reference_n": 32},
    "stability": {"y0": {"profile": "sine", "amplitude": 0.5, "mode": 1}, "c_hat": null}
  })");
  return d;
}

// Keys whose values are free-form objects rather than schema sections.
bool is_free_form(const std::string& path) { return path == "noise.small_jumps.radial"; }

void reject_unknown(const json& user, const json& schema, const std::string& prefix) {
  if (!user.is_object()) return;
  for (auto it = user.begin(); it != user.end(); ++it) {
    const std::string path = prefix.empty() ? it.key() : prefix + "." + it.key();
    if (!schema.contains(it.key())) throw ConfigError("unknown key '" + path + "'");
    const json& sub = schema.at(it.key());
    if (sub.is_object() && !is_free_form(path)) {
      if (!it.value().is_object()) throw ConfigError("'" + path + "' must be an object");
      reject_unknown(it.value(), sub, path);
    }
  }
}

// A null value means "use the default"; merge_patch would delete the key instead.
json without_nulls(const json& doc) {
  if (!doc.is_object()) return doc;
  json out = json::object();
  for (auto it = doc.begin(); it != doc.end(); ++it) {
    if (!it.value().is_null()) out[it.key()] = without_nulls(it.value());
  }
  return out;
}

const json& at_path(const json& root, const std::string& path) {
  const json* node = &root;
  std::size_t start = 0;
  while (true) {
    const std::size_t dot = path.find('.', start);
    const std::string key = path.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (!node->is_object() || !node->contains(key)) throw ConfigError("missing key '" + path + "'");
    node = &node->at(key);
    if (dot == std::string::npos) return *node;
    start = dot + 1;
  }
}

double number(const json& root, const std::string& path) {
  const json& v = at_path(root, path);
  if (!v.is_number()) throw ConfigError("'" + path + "' must be a number");
  return v.get<double>();
}

std::optional<double> optional_number(const json& root, const std::string& path) {
  const json& v = at_path(root, path);
  if (v.is_null()) return std::nullopt;
  if (!v.is_number()) throw ConfigError("'" + path + "' must be a number or null");
  return v.get<double>();
}

int integer(const json& root, const std::string& path) {
  const json& v = at_path(root, path);
  if (!v.is_number_integer()) throw ConfigError("'" + path + "' must be an integer");
  return v.get<int>();
}

std::string text(const json& root, const std::string& path) {
  const json& v = at_path(root, path);
  if (!v.is_string()) throw ConfigError("'" + path + "' must be a string");
  return v.get<std::string>();
}

bool boolean(const json& root, const std::string& path) {
  const json& v = at_path(root, path);
  if (!v.is_boolean()) throw ConfigError("'" + path + "' must be true or false");
  return v.get<bool>();
}

ProfileSpec profile(const json& root, const std::string& path) {
  ProfileSpec p;
  p.profile = text(root, path + ".profile");
  p.amplitude = number(root, path + ".amplitude");
  p.mode = integer(root, path + ".mode");
  return p;
}

void require_positive(double v, const std::string& path) {
  if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError("'" + path + "' must be finite and > 0");
}

void require_at_least(int v, int lo, const std::string& path) {
  if (v < lo) throw ConfigError("'" + path + "' must be >= " + std::to_string(lo));
}

NoiseConfig parse_noise(const json& r) {
  NoiseConfig nc;
  const int modes = integer(r, "noise.wiener.modes");
  require_at_least(modes, 0, "noise.wiener.modes");
  const json& amps = at_path(r, "noise.wiener.amplitudes");
  if (amps.is_null()) {
    nc.wiener_amplitudes.assign(modes, number(r, "noise.wiener.amplitude"));
  } else {
    if (!amps.is_array() || static_cast<int>(amps.size()) != modes) {
      throw ConfigError("'noise.wiener.amplitudes' must be an array of length noise.wiener.modes");
    }
    for (const auto& a : amps) {
      if (!a.is_number()) throw ConfigError("'noise.wiener.amplitudes' entries must be numbers");
      nc.wiener_amplitudes.push_back(a.get<double>());
    }
  }
  nc.b_scale = number(r, "noise.wiener.b_scale");

  nc.mark_dim = integer(r, "noise.small_jumps.mark_dim");
  require_at_least(nc.mark_dim, 1, "noise.small_jumps.mark_dim");
  const json& atoms = at_path(r, "noise.small_jumps.atoms");
  const json& radial = at_path(r, "noise.small_jumps.radial");
  if (!atoms.is_array()) throw ConfigError("'noise.small_jumps.atoms' must be an array");
  if (!atoms.empty() && !radial.is_null()) {
    throw ConfigError("give either 'noise.small_jumps.atoms' or 'noise.small_jumps.radial', not both");
  }
  for (std::size_t j = 0; j < atoms.size(); ++j) {
    const std::string where = "noise.small_jumps.atoms[" + std::to_string(j) + "]";
    const json& a = atoms[j];
    if (!a.is_object() || !a.contains("mark") || !a.contains("weight") || !a["mark"].is_array() ||
        !a["weight"].is_number()) {
      throw ConfigError("'" + where + "' must be {\"mark\": [..], \"weight\": w}");
    }
    SmallAtom atom;
    atom.mark = VectorXd(static_cast<Eigen::Index>(a["mark"].size()));
    for (std::size_t i = 0; i < a["mark"].size(); ++i) {
      if (!a["mark"][i].is_number()) throw ConfigError("'" + where + ".mark' entries must be numbers");
      atom.mark(static_cast<Eigen::Index>(i)) = a["mark"][i].get<double>();
    }
    atom.weight = a["weight"].get<double>();
    nc.atoms.push_back(std::move(atom));
  }
  if (!nc.atoms.empty()) nc.mark_dim = static_cast<int>(nc.atoms.front().mark.size());
  if (!radial.is_null()) {
    if (!radial.is_object()) throw ConfigError("'noise.small_jumps.radial' must be an object");
    for (const char* key : {"tail_index", "eps", "bins", "scale"}) {
      if (!radial.contains(key)) {
        throw ConfigError(std::string("missing key 'noise.small_jumps.radial.") + key + "'");
      }
    }
    nc.atoms = discretize_radial_density(number(r, "noise.small_jumps.radial.tail_index"),
                                         number(r, "noise.small_jumps.radial.eps"),
                                         integer(r, "noise.small_jumps.radial.bins"),
                                         number(r, "noise.small_jumps.radial.scale"), nc.mark_dim);
  }
  nc.f_scale = number(r, "noise.small_jumps.f_scale");
  nc.h = jump_profile_from_string(text(r, "noise.small_jumps.h"));

  nc.large_rate = number(r, "noise.large.rate");
  const std::string law = text(r, "noise.large.law");
  if (law == "pareto") {
    nc.large_law.kind = LargeMarkLaw::Kind::pareto;
  } else if (law == "fixed_radius") {
    nc.large_law.kind = LargeMarkLaw::Kind::fixed_radius;
  } else {
    throw ConfigError("'noise.large.law' must be pareto or fixed_radius");
  }
  nc.large_law.parameter = number(r, "noise.large.parameter");
  const std::string g = text(r, "noise.large.g.kind");
  if (g == "zero") {
    nc.g_kind = LargeJumpMap::Kind::zero;
  } else if (g == "additive") {
    nc.g_kind = LargeJumpMap::Kind::additive;
  } else if (g == "linear") {
    nc.g_kind = LargeJumpMap::Kind::linear;
  } else {
    throw ConfigError("'noise.large.g.kind' must be zero, additive or linear");
  }
  nc.g_scale = number(r, "noise.large.g.scale");
  nc.g_profile = profile(r, "noise.large.g");
  return nc;
}

ScalarMap lipschitz_map(const OperatorSpec& op) {
  const double a = op.f_scale;
  if (op.f_kind == "zero") return {};
  if (op.f_kind == "identity") return [a](double x) { return a * x; };
  if (op.f_kind == "tanh") return [a](double x) { return a * std::tanh(x); };
  throw ConfigError("'operator.f.kind' must be zero, identity or tanh");
}

ScalarMap reaction_map(const OperatorSpec& op) {
  if (op.f0_kind == "zero") return {};
  if (op.f0_kind == "cubic") {
    const double c1 = op.f0_c1;
    const double c2 = op.f0_c2;
    return [c1, c2](double x) { return x * (c2 + x * (c1 - x)); };
  }
  throw ConfigError("'operator.f0.kind' must be zero or cubic");
}

RhoForm::Kind rho_kind_from_string(const std::string& name) {
  if (name == "zero") return RhoForm::Kind::zero;
  if (name == "v_norm_sq") return RhoForm::Kind::v_norm_sq;
  if (name == "l4_quartic") return RhoForm::Kind::l4_quartic;
  if (name == "v_norm_pow") return RhoForm::Kind::v_norm_pow;
  throw ConfigError("'constants.rho.kind' must be zero, v_norm_sq, l4_quartic or v_norm_pow");
}

std::string rho_kind_name(RhoForm::Kind kind) {
  switch (kind) {
    case RhoForm::Kind::zero:
      return "zero";
    case RhoForm::Kind::v_norm_sq:
      return "v_norm_sq";
    case RhoForm::Kind::l4_quartic:
      return "l4_quartic";
    case RhoForm::Kind::v_norm_pow:
      return "v_norm_pow";
  }
  return "zero";
}

}  // namespace

ExperimentConfig parse_config(const json& doc, const ConfigOverrides& overrides) {
  if (!doc.is_object()) throw ConfigError("configuration must be a JSON object");
  reject_unknown(doc, defaults(), "");
  for (const char* key : {"dt", "T"}) {
    if (!doc.contains("solver") || !doc["solver"].contains(key) || doc["solver"][key].is_null()) {
      throw ConfigError(std::string("missing required key 'solver.") + key + "'");
    }
  }

  json r = defaults();
  r.merge_patch(without_nulls(doc));
  if (overrides.seed) r["seed"] = *overrides.seed;
  if (overrides.n) r["discretization"]["n"] = *overrides.n;
  if (overrides.dt) r["solver"]["dt"] = *overrides.dt;
  if (overrides.output_dir) r["output_dir"] = *overrides.output_dir;

  ExperimentConfig c;
  c.experiment = text(r, "experiment");
  const json& seed = at_path(r, "seed");
  if (!seed.is_number_unsigned() && !(seed.is_number_integer() && seed.get<std::int64_t>() >= 0)) {
    throw ConfigError("'seed' must be a non-negative integer");
  }
  c.seed = seed.get<std::uint64_t>();
  c.output_dir = text(r, "output_dir");

  c.domain = domain_from_string(text(r, "discretization.domain"));
  c.n = integer(r, "discretization.n");
  require_at_least(c.n, 1, "discretization.n");
  if (at_path(r, "discretization.components").is_null()) {
    r["discretization"]["components"] = c.domain == DomainKind::torus2d ? 2 : 1;
  }
  c.components = integer(r, "discretization.components");

  c.op.kind = text(r, "operator.kind");
  c.op.f_kind = text(r, "operator.f.kind");
  c.op.f_scale = number(r, "operator.f.scale");
  c.op.f0_kind = text(r, "operator.f0.kind");
  c.op.f0_c1 = number(r, "operator.f0.c1");
  c.op.f0_c2 = number(r, "operator.f0.c2");
  c.op.p = number(r, "operator.p");
  c.op.viscosity = number(r, "operator.viscosity");
  c.op.forcing = profile(r, "operator.forcing");

  c.constants.alpha = optional_number(r, "constants.alpha");
  c.constants.beta = optional_number(r, "constants.beta");
  c.constants.theta = optional_number(r, "constants.theta");
  c.constants.C = optional_number(r, "constants.C");
  c.constants.gamma = optional_number(r, "constants.gamma");
  c.constants.F = optional_number(r, "constants.F");
  if (!at_path(r, "constants.rho.kind").is_null()) c.constants.rho_kind = text(r, "constants.rho.kind");
  c.constants.rho_c = optional_number(r, "constants.rho.c");
  c.constants.rho_power = optional_number(r, "constants.rho.power");

  c.noise = parse_noise(r);

  c.solver.dt = number(r, "solver.dt");
  c.solver.T = number(r, "solver.T");
  c.solver.scheme = scheme_from_string(text(r, "solver.scheme"));
  c.solver.blowup_radius = number(r, "solver.blowup_radius");
  c.solver.record_stride = integer(r, "solver.record_stride");
  c.solver.record_coefficients = boolean(r, "solver.record_coefficients");
  c.solver.validate();

  c.initial = profile(r, "initial");
  c.ensemble_M = integer(r, "ensemble.M");
  require_at_least(c.ensemble_M, 1, "ensemble.M");

  c.verify.samples = integer(r, "verify.samples");
  c.verify.pairs = integer(r, "verify.pairs");
  c.verify.triples = integer(r, "verify.triples");
  c.verify.s_points = integer(r, "verify.s_points");
  c.verify.radius = number(r, "verify.radius");
  c.verify.decay = number(r, "verify.decay");
  c.verify.h1_rel_tol = number(r, "verify.h1_rel_tol");
  require_at_least(c.verify.samples, 1, "verify.samples");
  require_at_least(c.verify.pairs, 1, "verify.pairs");
  require_at_least(c.verify.triples, 1, "verify.triples");
  require_at_least(c.verify.s_points, 3, "verify.s_points");
  require_positive(c.verify.radius, "verify.radius");
  require_positive(c.verify.h1_rel_tol, "verify.h1_rel_tol");

  const json& n_list = at_path(r, "converge.n_list");
  if (!n_list.is_array() || n_list.empty()) throw ConfigError("'converge.n_list' must be a non-empty array");
  c.converge.n_list.clear();
  for (const auto& v : n_list) {
    if (!v.is_number_integer() || v.get<int>() < 1) {
      throw ConfigError("'converge.n_list' entries must be integers >= 1");
    }
    c.converge.n_list.push_back(v.get<int>());
  }
  c.converge.reference_n = integer(r, "converge.reference_n");
  for (int n : c.converge.n_list) {
    if (n > c.converge.reference_n) throw ConfigError("'converge.n_list' entries must not exceed converge.reference_n");
  }

  c.stability.y0 = profile(r, "stability.y0");
  c.stability.c_hat = optional_number(r, "stability.c_hat");

  // Building the experiment enforces every module invariant, including the γ gate.
  const Experiment ex = build_experiment(c);
  const auto& k = ex.suite.constants;
  r["constants"] = {{"alpha", k.alpha}, {"beta", k.beta}, {"theta", k.theta}, {"C", k.C},
                    {"gamma", k.gamma}, {"F", k.F.constant},
                    {"rho", {{"kind", rho_kind_name(k.rho.kind)}, {"c", k.rho.c}, {"power", k.rho.power}}}};
  c.resolved = std::move(r);
  return c;
}

ExperimentConfig load_config(const std::string& path, const ConfigOverrides& overrides) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path + ": " + e.what());
  }
  return parse_config(doc, overrides);
}

LevyNoiseSpec build_noise_spec(const ExperimentConfig& config) {
  const auto& nc = config.noise;
  VectorXd amps = Eigen::Map<const VectorXd>(nc.wiener_amplitudes.data(),
                                             static_cast<Eigen::Index>(nc.wiener_amplitudes.size()));
  return LevyNoiseSpec(nc.mark_dim, amps, nc.atoms, nc.large_rate, nc.large_law);
}

VectorXd build_profile(const Discretization& disc, const ProfileSpec& profile) {
  return profile_coefficients(disc, profile.profile, profile.amplitude, profile.mode);
}

OperatorSuite build_suite(const ExperimentConfig& config, const Discretization& disc,
                          const LevyNoiseSpec& spec) {
  const auto& op = config.op;
  const auto& nc = config.noise;
  const double beta_for_noise = config.constants.beta.value_or(op.kind == "ns2d" ? 2.0 : 4.0);

  LargeJumpMap g;
  g.kind = nc.g_kind;
  g.scale = nc.g_scale;
  if (g.kind == LargeJumpMap::Kind::additive) g.profile = build_profile(disc, nc.g_profile);
  NoiseMaps maps = lipschitz_noise_maps(disc, spec, nc.b_scale, nc.f_scale, nc.h, g, beta_for_noise);

  OperatorSuite suite;
  if (op.kind == "burgers") {
    suite = burgers_suite(disc, lipschitz_map(op), reaction_map(op), std::move(maps));
  } else if (op.kind == "p_laplace") {
    suite = p_laplace_suite(disc, op.p, reaction_map(op), std::move(maps));
  } else if (op.kind == "ns2d") {
    suite = ns2d_suite(disc, op.viscosity, build_profile(disc, op.forcing), std::move(maps));
  } else {
    throw ConfigError("'operator.kind' must be burgers, p_laplace or ns2d");
  }

  auto& k = suite.constants;
  const auto& o = config.constants;
  if (o.alpha) k.alpha = *o.alpha;
  if (o.beta) k.beta = *o.beta;
  if (o.theta) k.theta = *o.theta;
  if (o.C) k.C = *o.C;
  if (o.gamma) k.gamma = *o.gamma;
  if (o.F) k.F.constant = *o.F;
  if (o.rho_kind) k.rho.kind = rho_kind_from_string(*o.rho_kind);
  if (o.rho_c) k.rho.c = *o.rho_c;
  if (o.rho_power) k.rho.power = *o.rho_power;
  k.rho.v_exponent = k.alpha;
  k.validate();
  return suite;
}

Experiment build_experiment(const ExperimentConfig& config) {
  Experiment ex;
  ex.disc = build_discretization(config.domain, config.n, config.components);
  ex.spec = build_noise_spec(config);
  ex.suite = build_suite(config, ex.disc, ex.spec);
  ex.x0 = build_profile(ex.disc, config.initial);
  return ex;
}

}  // namespace levyspde

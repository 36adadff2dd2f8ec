#include <iostream>

#include "CLI11.hpp"
#include "levyspde/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Galerkin solver and condition checker for SPDEs with Levy noise"};
  app.set_version_flag("--version", std::string(levyspde::version_string()));
  app.require_subcommand(1);

  levyspde::CommandOptions opt;
  std::uint64_t seed = 0;
  int n = 0;
  double dt = 0.0;
  std::string out_dir;
  int threads = 0;

  const std::vector<std::pair<std::string, std::string>> subs = {
      {"run", "simulate one trajectory (interlaced large jumps)"},
      {"verify", "sample the framework inequalities and report margins"},
      {"converge", "Galerkin refinement study under shared noise"},
      {"moments", "Monte-Carlo moment estimate (requires g = 0)"},
      {"stability", "difference of two coupled paths"},
  };
  for (const auto& [name, help] : subs) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", opt.config_path, "experiment JSON file")->required()->check(CLI::ExistingFile);
    sub->add_option("--seed", seed, "master seed (overrides config)");
    sub->add_option("--out", out_dir, "output directory (overrides config)");
    sub->add_option("--threads", threads, "worker threads for ensembles")->check(CLI::PositiveNumber);
    sub->add_option("--n", n, "Galerkin level (overrides config)")->check(CLI::PositiveNumber);
    sub->add_option("--dt", dt, "time step (overrides config)")->check(CLI::PositiveNumber);
    sub->callback([&opt, name = name] { opt.subcommand = name; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  for (CLI::App* sub : app.get_subcommands()) {
    if (sub->count("--seed")) opt.overrides.seed = seed;
    if (sub->count("--out")) opt.overrides.output_dir = out_dir;
    if (sub->count("--threads")) opt.threads = threads;
    if (sub->count("--n")) opt.overrides.n = n;
    if (sub->count("--dt")) opt.overrides.dt = dt;
  }
  return levyspde::run_command(opt, std::cout, std::cerr);
}

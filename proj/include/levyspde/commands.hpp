#pragma once

#include <optional>
#include <ostream>
#include <string>

#include "levyspde/config.hpp"

namespace levyspde {

enum ExitCode : int {
  exit_ok = 0,
  exit_failure = 1,
  exit_config_error = 2,
  exit_refusal = 3,
  exit_blowup = 4,
};

struct CommandOptions {
  std::string subcommand;  // run | verify | converge | moments | stability
  std::string config_path;
  ConfigOverrides overrides;
  std::optional<int> threads;
};

/// Runs one subcommand and writes its files into the configured output
/// directory. Errors are reported on `err` as "error: <class>: <message>".
int run_command(const CommandOptions& options, std::ostream& out, std::ostream& err);

const char* version_string();

}  // namespace levyspde

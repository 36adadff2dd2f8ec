#pragma once

#include <stdexcept>
#include <string>

namespace levyspde {

/// Invalid combination of settings (discretization, suite, noise, config file).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Coefficient vectors that do not belong to the discretization they are used with.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A scalar parameter outside its admissible range (dt <= 0, p < 2, ...).
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// An operation refused because a hypothesis it relies on does not hold.
class RefusalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace levyspde

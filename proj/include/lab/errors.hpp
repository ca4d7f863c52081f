#pragma once

#include <stdexcept>
#include <string>

namespace lab {

// Bad user-supplied configuration (CLI exit code 2).
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Simulation or optimisation produced non-finite numbers (CLI exit code 3).
struct NumericalError : std::runtime_error {
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace lab

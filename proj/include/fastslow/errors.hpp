#pragma once

#include <stdexcept>
#include <string>

namespace fastslow {

/// Invalid user input: bad coefficients, malformed configuration, out-of-range arguments.
class ConfigError : public std::invalid_argument {
 public:
  explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

/// Integration or evaluation produced something unusable (non-finite state, step underflow,
/// error estimate above the requested cap).
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace fastslow

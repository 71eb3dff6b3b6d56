#pragma once

#include <stdexcept>
#include <string>

namespace srelab {

// Base class for all library errors.
struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed or inconsistent user input (config files, CLI arguments, data files).
struct ConfigError : Error {
  explicit ConfigError(const std::string& msg) : Error(msg) {}
};

// Parameter outside the documented domain of an operation.
struct DomainError : Error {
  explicit DomainError(const std::string& msg) : Error(msg) {}
};

// Root bracketing failed.  `side` names the bracket end that could not be
// established ("lower" or "upper").
struct NoRootError : Error {
  NoRootError(const std::string& msg, std::string side_)
      : Error(msg), side(std::move(side_)) {}
  std::string side;
};

// Numerical failure (overflow, non-finite intermediate, quadrature breakdown).
struct NumericError : Error {
  explicit NumericError(const std::string& msg) : Error(msg) {}
};

}  // namespace srelab

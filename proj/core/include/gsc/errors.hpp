#pragma once

#include <stdexcept>
#include <string>

namespace gsc {

// Bad user input: malformed config, parameter out of domain, missing file.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Runtime numerical failure: NaN/overflow during stepping, CFL violation,
// divergence monitor tripped.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

// Contract violation detected at an operation boundary (control leaves U,
// path exits a surface domain, candidate fails a membership test).
class DomainError : public std::runtime_error {
 public:
  explicit DomainError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace gsc

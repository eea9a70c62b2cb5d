#pragma once

#include <stdexcept>
#include <string>

namespace mfg {

/// Numerical failure inside a solver: singular linear system, non-finite
/// iterate, or a broken invariant that the caller cannot repair.
class SolverError : public std::runtime_error {
  public:
    explicit SolverError(const std::string& message) : std::runtime_error(message) {}
};

/// Rejected run configuration file: unknown key, bad value, missing section.
class ConfigError : public std::runtime_error {
  public:
    explicit ConfigError(const std::string& message) : std::runtime_error(message) {}
};

} // namespace mfg

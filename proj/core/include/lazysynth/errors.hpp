#pragma once

#include <stdexcept>
#include <string>

namespace lazysynth {

/* Invalid configuration or malformed input file. CLI exit code 1. */
class ConfigError : public std::runtime_error {
public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/* Non-finite value during integration. CLI exit code 2. */
class NumericalError : public std::runtime_error {
public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

/* A checked algorithmic property failed (monotonicity, lazy/eager agreement,
 * closed-loop soundness). CLI exit code 3. */
class PropertyViolation : public std::runtime_error {
public:
  explicit PropertyViolation(const std::string& what) : std::runtime_error(what) {}
};

/* Operation called outside its precondition (e.g. stepping a state that is
 * not in the controller domain). */
class PreconditionError : public std::logic_error {
public:
  explicit PreconditionError(const std::string& what) : std::logic_error(what) {}
};

}  // namespace lazysynth

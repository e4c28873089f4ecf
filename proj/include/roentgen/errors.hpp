#pragma once

#include <stdexcept>
#include <string>

namespace roentgen {

// Invalid user-facing input: a bad field, a malformed file, a violated
// precondition on parameters.
class ConfigError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

// Numerical failure: non-finite values, quadrature or integrator not
// converging within budget.
class NumericalError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// The request is well-formed but asks for a physically divergent quantity
// (e.g. the unregularized direction-resolved emission probability).
class PhysicsRejection : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

} // namespace roentgen

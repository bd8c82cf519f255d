#pragma once

#include <stdexcept>
#include <string>

namespace nlaa {

// Invalid parameters, schema violations, bad CLI input.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Solver breakdown: NaN, norm blow-up, non-convergence where convergence is required.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// No transition could be bracketed, or a fit has no admissible partition.
class UnidentifiableError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace nlaa

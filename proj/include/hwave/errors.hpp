#pragma once

#include <stdexcept>
#include <string>

namespace hwave {

// Bad argument to a library call (non-finite input, index mismatch, ...).
struct InputError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Parameters outside the admissible region (b^2 <= 4m, p out of range, ...).
struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};

// Run setup that cannot work (grid too coarse, too few time nodes, ...).
struct ConfigurationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Numerical result that contradicts its own assumptions.
struct ConsistencyError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NonContractionError : std::runtime_error {
  NonContractionError(const std::string& what, double eps)
      : std::runtime_error(what), epsilon(eps) {}
  double epsilon;
};

}  // namespace hwave

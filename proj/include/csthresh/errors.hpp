#pragma once

#include <stdexcept>
#include <string>

namespace csthresh {

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Mismatched or over-budget dimensions.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A bracketed root search found no sign change.
class NoRootError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A solver could not certify its answer at the requested tolerance.
class NumericalFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A linear program came back without an optimal solution.
class LpStatusError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace csthresh

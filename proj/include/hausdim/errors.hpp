#pragma once

#include <stdexcept>
#include <string>

namespace hausdim {

/// Argument outside the documented domain of an operation.
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A computation would exceed the configured size guards (grid size, term count).
class ResourceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Quadrature non-convergence or a corrupted intermediate (negative mass, NaN).
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Caller-side contract violation detected while checking a mathematical statement.
class PreconditionError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace hausdim

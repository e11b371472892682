#pragma once

#include <stdexcept>
#include <string>

namespace gibbs {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operands live on different state spaces or have incompatible sizes.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Input violates a documented precondition (bad pmf, bad weights, ...).
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// A numerical routine failed (eigen-solver non-convergence, ...).
class NumericError : public Error {
 public:
  using Error::Error;
};

/// The state space exceeds the dense-algebra cap.
class CapExceeded : public Error {
 public:
  using Error::Error;
};

}  // namespace gibbs

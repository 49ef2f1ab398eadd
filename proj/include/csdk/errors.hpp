#pragma once

#include <stdexcept>
#include <string>

namespace csdk {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Cholesky met a non-positive pivot.
class NotPositiveDefinite : public Error {
 public:
  using Error::Error;
};

class SingularMatrix : public Error {
 public:
  using Error::Error;
};

/// An iteration hit its cap or failed its post-convergence check.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

/// A documented precondition of an operation does not hold for the input.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// The input is too far from any partial isometry to be decomposed.
class InputRejected : public Error {
 public:
  using Error::Error;
};

/// The number of eigenvalues found in [-1, 1] disagrees with the rank estimate.
class RankInconsistency : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

}  // namespace csdk

#pragma once

#include <stdexcept>
#include <string>

namespace charkern {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input violates a documented invariant (mass, symmetry, sign, shape).
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Argument lies outside the domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A Gram matrix or quadratic form is not positive semidefinite.
class PsdViolation : public Error {
 public:
  using Error::Error;
};

/// Structural precondition of a construction is not met.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// An iterative numerical procedure failed to converge.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

/// Malformed input file or document.
class ParseError : public Error {
 public:
  using Error::Error;
};

/// Two objects that must share a space do not.
class SpaceMismatch : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

}  // namespace charkern

#pragma once

#include <stdexcept>
#include <string>

namespace aperio {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on the arguments was violated.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// The finite sample is too small for the requested construction
/// (a ball leaves the window, no eligible centers, ...).
class InsufficientSample : public Error {
 public:
  using Error::Error;
};

/// A numerical requirement failed: no spectral gap, unitarity or symmetry
/// defect above tolerance, unresolved kernel dimension.
class NumericalError : public Error {
 public:
  using Error::Error;
};

class GaplessError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// Singular values fall inside the ambiguity band around the kernel
/// threshold; a larger sample is needed to decide the kernel dimension.
class UnresolvedError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace aperio

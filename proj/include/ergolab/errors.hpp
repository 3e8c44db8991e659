#pragma once

#include <stdexcept>
#include <string>

namespace ergolab {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input failed a documented precondition (bad dimension, non-unimodular
/// matrix, malformed function spec, ...). The message names the field.
class ValidationError : public Error {
 public:
  using Error::Error;
};

class UnsupportedDimension : public ValidationError {
 public:
  explicit UnsupportedDimension(int n)
      : ValidationError("unsupported dimension n=" + std::to_string(n) + " (expected 2 or 3)") {}
};

class DimensionMismatch : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class ZeroVector : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// Column orthonormalization hit a numerically rank-deficient leading minor.
class DecompositionFailure : public Error {
 public:
  using Error::Error;
};

/// The element has repeated singular values, so it has no boundary image.
class NotRegular : public Error {
 public:
  using Error::Error;
};

/// A predicted workload exceeds the configured cap.
class ResourceLimit : public Error {
 public:
  using Error::Error;
};

/// An average over an empty lattice ball was requested.
class EmptyLattice : public Error {
 public:
  using Error::Error;
};

}  // namespace ergolab

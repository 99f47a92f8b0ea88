#pragma once

#include <stdexcept>
#include <string>

namespace qfl {

/// Base class for every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Shapes, ranges or preconditions on the inputs do not hold.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A Fock representation would exceed the configured dimension cap.
class DimensionCapExceeded : public Error {
 public:
  using Error::Error;
};

/// The truncated Fock space cannot represent the state faithfully.
class TruncationLeakage : public Error {
 public:
  using Error::Error;
};

/// A numerical procedure diverged or lost an invariant it must keep.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Input documents that are not well-formed or miss required fields.
class MalformedInput : public Error {
 public:
  using Error::Error;
};

}  // namespace qfl

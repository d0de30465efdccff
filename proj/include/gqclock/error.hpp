#pragma once

#include <stdexcept>
#include <string>

namespace gqclock {

// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A precondition on an input value or configuration was violated.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// Conditioning on an outcome whose Born probability is (numerically) zero.
class ImpossibleConditioning : public Error {
 public:
  using Error::Error;
};

// A numerical procedure could not produce a trustworthy value
// (finite-difference disagreement, non-finite table entries, ...).
class NumericalFailure : public Error {
 public:
  using Error::Error;
};

namespace detail {

inline void require(bool condition, const std::string& message) {
  if (!condition) throw InvalidArgument(message);
}

}  // namespace detail
}  // namespace gqclock

#pragma once

#include <stdexcept>
#include <string>

namespace synergy {

// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An argument violates a type invariant (non-unit axis, non-orthonormal
// matrix, non-skew input, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

// A construction precondition does not hold: infeasible warping axis, gain
// above the admissible bound, hysteresis threshold outside the gap, ...
class PreconditionError : public Error {
 public:
  using Error::Error;
};

// Malformed scenario file or command-line value.
class ParseError : public Error {
 public:
  using Error::Error;
};

// The simulator exceeded its step or jump budget.
class ZenoError : public Error {
 public:
  using Error::Error;
};

}  // namespace synergy

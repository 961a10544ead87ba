#pragma once

#include <stdexcept>
#include <string>

namespace swstab {

// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input text (JSON syntax, wrong value types).
class ParseError : public Error {
 public:
  using Error::Error;
};

// Well-formed input that violates a documented invariant (shapes, finiteness,
// configuration ranges). Messages carry the offending field path.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// The LP kernel lost accuracy (ill-conditioned basis, residual blow-up,
// iteration cap). Distinct from an Infeasible/Unbounded classification.
class NumericalError : public Error {
 public:
  using Error::Error;
};

// An internal invariant that the inputs should have guaranteed did not hold.
class InvariantError : public Error {
 public:
  using Error::Error;
};

// Closed-loop simulation failures (non-finite state, information-pattern
// mismatch between controller and switching signal).
class SimulationError : public Error {
 public:
  using Error::Error;
};

}  // namespace swstab

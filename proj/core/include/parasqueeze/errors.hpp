#pragma once

#include <stdexcept>
#include <string>

namespace parasqueeze {

// Base class for all domain errors raised by this library. Precondition
// violations (bad parameter ranges, malformed input series) throw
// std::invalid_argument instead.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A closed-form expression sits on an instability threshold: a response
// denominator or elimination pivot vanished, so no finite stationary
// solution exists at the requested parameters.
class SingularThreshold : public Error {
 public:
  using Error::Error;
};

// An operation that is only defined at exact parametric resonance
// (omega0^2 = omega^2) was called with a detuned drive.
class DetunedInput : public Error {
 public:
  using Error::Error;
};

// A quadratic threshold condition has no real solution.
class NoRealRoot : public Error {
 public:
  using Error::Error;
};

// An iterative solver exhausted its iteration budget.
class NoConvergence : public Error {
 public:
  using Error::Error;
};

// A mode-shape evaluation was requested at a point that does not satisfy
// the Hopf characteristic equation.
class NotOnHopfLine : public Error {
 public:
  using Error::Error;
};

// A bracketing root finder was given a bracket without a sign change.
class NoSignChange : public Error {
 public:
  using Error::Error;
};

// An input series is too short for the requested estimator.
class TooShort : public Error {
 public:
  using Error::Error;
};

}  // namespace parasqueeze

#pragma once

#include <stdexcept>
#include <string>

namespace adiabatica {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on an argument was violated (invalid parameters, frame mismatch, ...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A wave packet came too close to the edge of the periodic simulation box.
class DomainGuardError : public Error {
 public:
  using Error::Error;
};

/// A quantity was requested at a degenerate point (G = 0 and zero splitting).
class DegeneratePointError : public Error {
 public:
  using Error::Error;
};

/// An integrator step is too coarse for the local time scale.
class StepSizeError : public Error {
 public:
  using Error::Error;
};

/// The inverse coupling construction left its domain: the coupling diverges at `critical_time`.
class InversionDomainError : public Error {
 public:
  InversionDomainError(const std::string& what, double critical_time)
      : Error(what), critical_time_(critical_time) {}

  double critical_time() const noexcept { return critical_time_; }

 private:
  double critical_time_;
};

}  // namespace adiabatica

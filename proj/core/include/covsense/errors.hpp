#pragma once

#include <stdexcept>
#include <string>

namespace covsense {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A parameter lies outside its documented domain.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class UnknownModeError : public Error {
 public:
  explicit UnknownModeError(const std::string& label)
      : Error("unknown mode '" + label + "'") {}
};

/// Covariance matrix is not symmetric or violates the uncertainty relation.
class InvalidStateError : public Error {
 public:
  using Error::Error;
};

/// Receiver calibration scale vanished (no cosine response to scale).
class CalibrationError : public Error {
 public:
  using Error::Error;
};

/// Delta-method phase error requested where sin(theta) = 0.
class SingularityError : public Error {
 public:
  using Error::Error;
};

class ConvergenceError : public Error {
 public:
  using Error::Error;
};

/// Root finder could not bracket the target.
class BracketError : public Error {
 public:
  using Error::Error;
};

/// Fock-space truncation invalidates the requested computation.
class TruncationError : public Error {
 public:
  using Error::Error;
};

/// Refused Monte Carlo run: aggregate-count Gaussian sampling is not justified.
class GuardError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace covsense

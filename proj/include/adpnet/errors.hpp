#pragma once

#include <stdexcept>
#include <string>

namespace adpnet {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Inconsistent shapes or invalid construction parameters.
class ConfigurationError : public Error {
 public:
  using Error::Error;
};

/// Invalid call-site argument (negative step, length mismatch, out of range).
class ArgumentError : public Error {
 public:
  using Error::Error;
};

class NumericalOverflowError : public Error {
 public:
  using Error::Error;
};

/// A closed-loop trajectory left the overflow guard.
class DivergenceError : public Error {
 public:
  DivergenceError(const std::string& what, double time) : Error(what), time_(time) {}

  /// Simulation time at which the guard tripped.
  double time() const noexcept { return time_; }

 private:
  double time_;
};

class SolverError : public Error {
 public:
  using Error::Error;
};

/// Non-finite learner quantity (training divergence).
class DiagnosticsError : public Error {
 public:
  using Error::Error;
};

class InvariantViolation : public Error {
 public:
  using Error::Error;
};

class RankDeficiencyError : public Error {
 public:
  using Error::Error;
};

}  // namespace adpnet

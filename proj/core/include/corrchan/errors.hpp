#pragma once

#include <stdexcept>
#include <string>

namespace corrchan {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidDimension : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

/// A coherent amplitude does not fit into the requested Fock cutoff.
class CutoffTooSmall : public Error {
 public:
  CutoffTooSmall(double amplitude, int cutoff, double tail, double tolerance);

  double amplitude() const noexcept { return amplitude_; }
  int cutoff() const noexcept { return cutoff_; }
  double tail() const noexcept { return tail_; }

 private:
  double amplitude_;
  int cutoff_;
  double tail_;
};

class DegenerateState : public Error {
 public:
  using Error::Error;
};

/// Argument outside the mathematical domain (negative time, zero temperature ratio, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

class StepSizeError : public Error {
 public:
  using Error::Error;
};

/// A numerical invariant (trace, positivity, Q >= 0) was violated beyond tolerance.
class NumericalError : public Error {
 public:
  using Error::Error;
};

class IntegrationFailure : public Error {
 public:
  IntegrationFailure(const std::string& what, double time, double trace_drift,
                     double min_eigenvalue);

  double time() const noexcept { return time_; }
  double trace_drift() const noexcept { return trace_drift_; }
  double min_eigenvalue() const noexcept { return min_eigenvalue_; }

 private:
  double time_;
  double trace_drift_;
  double min_eigenvalue_;
};

/// Scenario file problems. `field` is a JSON pointer-like path, `line` is 0 when unknown.
class ConfigError : public Error {
 public:
  ConfigError(const std::string& field, const std::string& message, int line = 0);

  const std::string& field() const noexcept { return field_; }
  int line() const noexcept { return line_; }

 private:
  std::string field_;
  int line_;
};

}  // namespace corrchan

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace regkernel {

/// Raised when an argument lies outside an operation's domain, e.g. r <= 0
/// for the singular kernel or coincident particles without regularization.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Raised when an iterative numerical method fails to meet its tolerance.
/// Carries the best estimate reached so callers can report it.
class NumericalError : public std::runtime_error {
 public:
  NumericalError(const std::string& what, double estimate, double error_estimate)
      : std::runtime_error(what), estimate_(estimate), error_estimate_(error_estimate) {}

  double estimate() const noexcept { return estimate_; }
  double error_estimate() const noexcept { return error_estimate_; }

 private:
  double estimate_;
  double error_estimate_;
};

/// Raised when a root bracket for epsilon calibration does not exist.
class CalibrationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when the integrated state becomes non-finite.
class IntegrationBlowup : public std::runtime_error {
 public:
  IntegrationBlowup(const std::string& what, std::size_t step)
      : std::runtime_error(what), step_(step) {}

  std::size_t step() const noexcept { return step_; }

 private:
  std::size_t step_;
};

}  // namespace regkernel

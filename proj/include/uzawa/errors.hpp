#pragma once

#include <stdexcept>
#include <string>

namespace uzawa {

/// Base for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Non-positive factor inputs or an evaluation point outside a function's domain.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Invalid parameters (alpha outside (0,1), sigma <= 0, CFL violation, ...).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Time integration left the positive orthant.
class IntegrationError : public Error {
 public:
  IntegrationError(const std::string& what, double time) : Error(what), time_(time) {}
  double time() const noexcept { return time_; }

 private:
  double time_;
};

/// Time integration produced non-finite values.
class OverflowError : public Error {
 public:
  OverflowError(const std::string& what, double time) : Error(what), time_(time) {}
  double time() const noexcept { return time_; }

 private:
  double time_;
};

/// A trajectory does not support the requested analysis (window too short,
/// no balanced growth path, no convergence).
class AnalysisError : public Error {
 public:
  using Error::Error;
};

/// Floating-point guard tripped (underflowing denominators and similar).
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace uzawa

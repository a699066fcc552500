#pragma once

#include <stdexcept>
#include <string>

namespace ve2d {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Rejected input: bad grid, out-of-range parameter, index overflow.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A primitive state whose velocity or deformation is not divergence-free.
class AdmissibilityError : public Error {
 public:
  AdmissibilityError(const std::string& what, double residual)
      : Error(what), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

/// Non-finite values or runaway energy during time integration.
class BlowUpError : public Error {
 public:
  BlowUpError(const std::string& what, double time) : Error(what), time_(time) {}
  double time() const noexcept { return time_; }

 private:
  double time_;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace ve2d

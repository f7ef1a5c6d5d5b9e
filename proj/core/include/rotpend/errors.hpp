#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace rotpend {

/// Error classes surfaced by the library. The CLI maps each one to a
/// distinct exit status.
enum class ErrorKind {
  kInvalidPhysics,
  kInvalidArgument,
  kConfigSyntax,
  kConfigSemantic,
  kScenarioInvalid,
  kNotHurwitz,
  kNumericalFailure,
  kDivergence,
  kIo,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class ConfigSyntaxError : public Error {
 public:
  ConfigSyntaxError(int line, const std::string& what)
      : Error(ErrorKind::kConfigSyntax,
              "line " + std::to_string(line) + ": " + what),
        line_(line) {}

  int line() const noexcept { return line_; }

 private:
  int line_;
};

/// Raised when AᵀP + PA = −Q has no positive definite solution because A
/// has an eigenvalue with non-negative real part.
class NotHurwitzError : public Error {
 public:
  NotHurwitzError(std::complex<double> eigenvalue, const std::string& what)
      : Error(ErrorKind::kNotHurwitz, what), eigenvalue_(eigenvalue) {}

  std::complex<double> eigenvalue() const noexcept { return eigenvalue_; }

 private:
  std::complex<double> eigenvalue_;
};

class DivergenceError : public Error {
 public:
  DivergenceError(double time, const std::string& what)
      : Error(ErrorKind::kDivergence, what), time_(time) {}

  double time() const noexcept { return time_; }

 private:
  double time_;
};

}  // namespace rotpend

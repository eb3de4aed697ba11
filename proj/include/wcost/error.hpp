#pragma once

#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace wcost {

/// Base of every error raised by the library. `exit_code()` is the process
/// exit status the CLI maps the error to.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual int exit_code() const noexcept { return 1; }
};

/// Invalid parameters or inputs that violate a declared contract.
class ValidationError : public Error {
 public:
  using Error::Error;
  int exit_code() const noexcept override { return 2; }
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// A numerical procedure failed to reach its accuracy contract.
class NumericalError : public Error {
 public:
  using Error::Error;
  int exit_code() const noexcept override { return 3; }
};

/// An improper integral could not be certified finite to tolerance.
class IntegrabilityError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// The truncated tail of a simulated limit is too large relative to the draws.
class TruncationError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// A required assumption check failed and was not overridden.
class HypothesisError : public Error {
 public:
  HypothesisError(std::string condition, const std::string& what)
      : Error(what), condition_(std::move(condition)) {}
  int exit_code() const noexcept override { return 4; }
  const std::string& condition() const noexcept { return condition_; }

 private:
  std::string condition_;
};

using WarningHandler = std::function<void(std::string_view)>;

/// Emits a non-fatal diagnostic through the installed handler (stderr by default).
void warn(std::string_view message);

/// Installs a new handler and returns the previous one.
WarningHandler set_warning_handler(WarningHandler handler);

}  // namespace wcost

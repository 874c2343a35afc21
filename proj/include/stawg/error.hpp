#pragma once

#include <stdexcept>
#include <string>

namespace stawg {

enum class ErrorKind {
  degenerate_input,
  invalid_spec,
  step_too_coarse,
  singularity,
  stiffness,
  singular_start,
  tolerance_not_met,
  non_finite_state,
  recurrence,
  config,
  missing_baseline,
  io,
};

const char* to_string(ErrorKind kind) noexcept;

// Base of every exception thrown by the library; carries a machine-readable kind.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

// Invalid physical or numerical input supplied by the caller.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Integration or synthesis failed on otherwise valid input.
class NumericalError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& message) : Error(ErrorKind::config, message) {}
};

}  // namespace stawg

#pragma once

#include <stdexcept>
#include <string>

namespace radcrit {

/// Interval or point outside the problem domain.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Malformed argument (sizes, signs, degenerate data).
class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Non-finite potential sample or similar evaluation failure.
class EvaluationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A mathematical hypothesis required by an operation does not hold.
class PreconditionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operation requested in the wrong regime (e.g. ground state of a
/// subcritical functional).
class StateError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Config file problems, carrying the offending line when known.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& what, int line = 0)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

}  // namespace radcrit

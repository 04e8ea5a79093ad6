#pragma once

#include <stdexcept>
#include <string>

namespace liftsim {

// Argument outside the mathematical domain of an operation (non-positive
// pendulum height, non-positive natural frequency, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// The payload moment cannot be balanced by leaning (f_2 <= 0).
class InfeasibleEquilibrium : public DomainError {
 public:
  using DomainError::DomainError;
};

// Invalid configuration: parameter invariants, step sizes, scenario contents.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class SynthesisError : public std::runtime_error {
 public:
  SynthesisError(const std::string& what, double residual)
      : std::runtime_error(what), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

// Scenario/log parse failure. `line` is 1-based, 0 when unknown.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& field, int line, const std::string& message);
  const std::string& field() const { return field_; }
  int line() const { return line_; }

 private:
  std::string field_;
  int line_;
};

}  // namespace liftsim

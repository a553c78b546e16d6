#pragma once

#include <stdexcept>
#include <string>

namespace ecofire {

// Invalid input: bad parameter, violated precondition. The CLI maps these to
// exit status 2.
class ValidationError : public std::invalid_argument {
public:
  ValidationError(std::string field, const std::string& message)
      : std::invalid_argument(field + ": " + message), field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

private:
  std::string field_;
};

// A computation that cannot produce a result for otherwise valid input. The
// CLI maps these to exit status 3.
class NumericalError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class HypothesisViolated : public ValidationError {
public:
  using ValidationError::ValidationError;
};

class DegenerateDiffusion : public ValidationError {
public:
  DegenerateDiffusion() : ValidationError("c,d", "at least one diffusion coefficient must be positive") {}
};

class VarsigmaOutOfRange : public ValidationError {
public:
  using ValidationError::ValidationError;
};

class CflViolation : public ValidationError {
public:
  using ValidationError::ValidationError;
};

class NoWaveTrain : public NumericalError {
public:
  NoWaveTrain() : NumericalError("no wave train: Upsilon >= 0") {}
};

class StepFailure : public NumericalError {
public:
  using NumericalError::NumericalError;
};

class SlowDecay : public NumericalError {
public:
  using NumericalError::NumericalError;
};

}  // namespace ecofire

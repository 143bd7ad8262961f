#pragma once

#include <stdexcept>
#include <string>

namespace msrelax {

enum class ErrorKind {
  InvalidArgument,
  NonPositiveRadius,
  Unresolved,
  OptimFail,
  NonZeroMean,
  OrderingViolation,
  ResampleFailure,
  NearPole,
  OutOfRadius,
  SolverSingular,
  NegativeDissipation,
  StepRejected,
  RecenterFail,
  MonotoneViolation,
  EnergyBalanceFail,
  HypothesisFail,
  ConfigError,
  IoError,
};

const char* to_string(ErrorKind kind);

// All failures raised by the library carry a kind so callers (the CLI, the
// integrator's rejection loop) can react without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace msrelax

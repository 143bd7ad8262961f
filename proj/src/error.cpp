#include "msrelax/error.hpp"

namespace msrelax {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::NonPositiveRadius: return "NonPositiveRadius";
    case ErrorKind::Unresolved: return "Unresolved";
    case ErrorKind::OptimFail: return "OptimFail";
    case ErrorKind::NonZeroMean: return "NonZeroMean";
    case ErrorKind::OrderingViolation: return "OrderingViolation";
    case ErrorKind::ResampleFailure: return "ResampleFailure";
    case ErrorKind::NearPole: return "NearPole";
    case ErrorKind::OutOfRadius: return "OutOfRadius";
    case ErrorKind::SolverSingular: return "SolverSingular";
    case ErrorKind::NegativeDissipation: return "NegativeDissipation";
    case ErrorKind::StepRejected: return "StepRejected";
    case ErrorKind::RecenterFail: return "RecenterFail";
    case ErrorKind::MonotoneViolation: return "MonotoneViolation";
    case ErrorKind::EnergyBalanceFail: return "EnergyBalanceFail";
    case ErrorKind::HypothesisFail: return "HypothesisFail";
    case ErrorKind::ConfigError: return "ConfigError";
    case ErrorKind::IoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace msrelax

#include "asian/error.hpp"

namespace asian {

std::string_view error_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::DegenerateVolatility: return "DegenerateVolatility";
    case ErrorCode::ArbitrageViolation: return "ArbitrageViolation";
    case ErrorCode::InstanceTooLarge: return "InstanceTooLarge";
    case ErrorCode::VarianceBoundVacuous: return "VarianceBoundVacuous";
    case ErrorCode::NegativeDeepValue: return "NegativeDeepValue";
    case ErrorCode::RootAboveBarrier: return "RootAboveBarrier";
    case ErrorCode::InvalidR: return "InvalidR";
    case ErrorCode::BucketShapeMismatch: return "BucketShapeMismatch";
    case ErrorCode::AlphaOutOfRange: return "AlphaOutOfRange";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::InvariantViolation: return "InvariantViolation";
  }
  return "Unknown";
}

void fail(ErrorCode code, const std::string& message) {
  throw PricingError(code, message);
}

}  // namespace asian

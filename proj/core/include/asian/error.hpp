#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace asian {

enum class ErrorCode {
  InvalidArgument,
  DegenerateVolatility,
  ArbitrageViolation,
  InstanceTooLarge,
  VarianceBoundVacuous,
  NegativeDeepValue,
  RootAboveBarrier,
  InvalidR,
  BucketShapeMismatch,
  AlphaOutOfRange,
  ConfigError,
  InvariantViolation,
};

/// Stable identifier used in CLI error records, e.g. "DegenerateVolatility".
std::string_view error_name(ErrorCode code) noexcept;

class PricingError : public std::runtime_error {
 public:
  PricingError(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }
  std::string_view name() const noexcept { return error_name(code_); }

 private:
  ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& message);

inline void require(bool condition, ErrorCode code, const char* message) {
  if (!condition) fail(code, message);
}

}  // namespace asian

#pragma once

#include <stdexcept>
#include <string>

namespace teamdec {

enum class ErrorCode {
  DimensionMismatch,
  NotPositiveDefinite,
  NotPSD,
  NonPositiveBudget,
  NonPositiveParam,
  UnknownSchedule,
  AssumptionViolated,
  LengthMismatch,
  SingularSystem,
  EmptySample,
  ZeroMatrix,
  InvalidConfig,
  IoError,
};

const char* to_string(ErrorCode code);

/// Library error carrying a stable machine-readable code.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& message);

}  // namespace teamdec

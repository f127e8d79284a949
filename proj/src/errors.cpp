#include "teamdec/errors.hpp"

namespace teamdec {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorCode::NotPSD: return "NotPSD";
    case ErrorCode::NonPositiveBudget: return "NonPositiveBudget";
    case ErrorCode::NonPositiveParam: return "NonPositiveParam";
    case ErrorCode::UnknownSchedule: return "UnknownSchedule";
    case ErrorCode::AssumptionViolated: return "AssumptionViolated";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::SingularSystem: return "SingularSystem";
    case ErrorCode::EmptySample: return "EmptySample";
    case ErrorCode::ZeroMatrix: return "ZeroMatrix";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

void fail(ErrorCode code, const std::string& message) { throw Error(code, message); }

}  // namespace teamdec

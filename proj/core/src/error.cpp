#include "dps/error.hpp"

namespace dps {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::SingularBasis: return "SingularBasis";
    case ErrorCode::NonSquare: return "NonSquare";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::UnknownName: return "UnknownName";
    case ErrorCode::BudgetExceeded: return "BudgetExceeded";
    case ErrorCode::InvalidParams: return "InvalidParams";
    case ErrorCode::NonPositive: return "NonPositive";
    case ErrorCode::NotNested: return "NotNested";
    case ErrorCode::BracketFailure: return "BracketFailure";
    case ErrorCode::ResolutionExceeded: return "ResolutionExceeded";
    case ErrorCode::InternalMismatch: return "InternalMismatch";
    case ErrorCode::UsageError: return "UsageError";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

void fail(ErrorCode code, const std::string& message) { throw Error(code, message); }

}  // namespace dps

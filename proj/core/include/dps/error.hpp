#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace dps {

enum class ErrorCode {
  SingularBasis,
  NonSquare,
  DimensionMismatch,
  UnknownName,
  BudgetExceeded,
  InvalidParams,
  NonPositive,
  NotNested,
  BracketFailure,
  ResolutionExceeded,
  InternalMismatch,
  UsageError,
};

std::string_view to_string(ErrorCode code);

// All library failures are reported through this exception type; the code
// identifies the failure class, the message carries the context.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& message);

}  // namespace dps

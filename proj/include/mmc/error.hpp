#pragma once

#include <stdexcept>
#include <string>

namespace mmc {

enum class ErrorCode {
  kAmplitudeOverflow,
  kLengthMismatch,
  kInvalidArgument,
  kMissingState,
  kNoParameters,
  kBudgetOverflow,
  kFieldOverflow,
  kTruncatedStream,
  kReservedModel,
  kDegenerateFit,
  kUnreachableTarget,
  kUnsupportedPrior,
  kCorruptContainer,
  kIo,
};

// All library failures are reported with this exception type; the code lets
// callers branch without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace mmc

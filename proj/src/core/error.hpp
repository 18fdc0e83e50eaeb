#pragma once

#include <stdexcept>
#include <string>

namespace nemx {

// Numeric values are part of the C ABI (see include/nemx/nemx.h).
enum class ErrorCode : int {
  kInvalidArgument = 1,
  kConfig = 2,
  kDomain = 3,
  kRange = 4,
  kSandwich = 5,
  kInfeasibleTarget = 6,
  kCalibration = 7,
  kOracleScale = 8,
  kNoInteriorPoint = 9,
  kProbeFailed = 10,
  kUndefinedRatio = 11,
  kGainUndefined = 12,
  kSweep = 13,
  kIo = 14,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

}  // namespace nemx

#pragma once

#include <stdexcept>
#include <string>

namespace mvdb {

enum class ErrorCode {
  kUsage,
  kInput,
  kDegenerateWeight,
  kInvalidView,
  kUnsupportedHardConstraint,
  kInconsistentConstraints,
  kCapExceeded,
  kOrderMismatch,
  kPrecondition,
  kFormat,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Process exit status for an error surfaced by the CLI.
inline int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::kUsage:
      return 1;
    case ErrorCode::kInconsistentConstraints:
      return 3;
    case ErrorCode::kCapExceeded:
      return 4;
    default:
      return 2;
  }
}

}  // namespace mvdb

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace arsip {

enum class ErrorCode {
  kNotFound,
  kConflict,
  kValidation,
  kInvalidCategory,
  kMalformedScript,
  kCorruptLog,
  kUnsupportedVersion,
  kIo,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Domain error carried by every fallible operation in the library. The code
/// is what callers branch on; the message is for humans.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace arsip

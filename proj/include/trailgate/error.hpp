#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace trailgate {

enum class Errc {
  kDuplicatePrompt,
  kWeightOutOfRange,
  kEmptyPrompt,
  kEmptyPrefs,
  kInvalidRoi,
  kDegenerateRoi,
  kDimensionMismatch,
  kEmptyInput,
  kEmptyRoi,
  kZeroVector,
  kProviderUnavailable,
  kMalformedResponse,
  kHocTimeout,
  kNoPendingRequest,
  kUnmappedClass,
  kDecodeError,
  kConfigError,
  kIoError,
  kInvalidArgument,
};

std::string_view to_string(Errc code) noexcept;

/// Every failure surfaced by the library carries one of the codes above so
/// callers (CLI exit codes, HTTP status mapping) can branch without parsing
/// message text.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code), message_(message) {}

  Errc code() const noexcept { return code_; }
  /// Message without the code prefix.
  const std::string& message() const noexcept { return message_; }

 private:
  Errc code_;
  std::string message_;
};

}  // namespace trailgate

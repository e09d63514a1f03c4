#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace kum {

enum class ErrorCode {
  InvariantBreach,
  AmbiguousPattern,
  AlphabetError,
  SizeLimit,
  ConfigError,
  HaltedError,
  TooManyLabels,
  LayoutError,
  NodeUnknown,
  EmptyPlasmodium,
  UnknownSession,
  BadMessage,
  ParseError,
};

std::string_view to_string(ErrorCode code) noexcept;

// Single exception type for the library; callers branch on code().
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace kum

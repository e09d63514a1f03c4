#include "kum/core/error.hpp"

namespace kum {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvariantBreach: return "InvariantBreach";
    case ErrorCode::AmbiguousPattern: return "AmbiguousPattern";
    case ErrorCode::AlphabetError: return "AlphabetError";
    case ErrorCode::SizeLimit: return "SizeLimit";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::HaltedError: return "HaltedError";
    case ErrorCode::TooManyLabels: return "TooManyLabels";
    case ErrorCode::LayoutError: return "LayoutError";
    case ErrorCode::NodeUnknown: return "NodeUnknown";
    case ErrorCode::EmptyPlasmodium: return "EmptyPlasmodium";
    case ErrorCode::UnknownSession: return "UnknownSession";
    case ErrorCode::BadMessage: return "BadMessage";
    case ErrorCode::ParseError: return "ParseError";
  }
  return "Unknown";
}

}  // namespace kum

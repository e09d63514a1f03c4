#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "kum/core/span.hpp"

namespace kum::lang {

enum class Severity { Error, Warning, Note };

std::string_view to_string(Severity s) noexcept;

struct Diagnostic {
  Severity severity = Severity::Error;
  std::string message;
  SourceSpan span;
  std::vector<SourceSpan> related;  // e.g. the first definition of a duplicate
};

// `<file>:<line>:<col>: <severity>: <message>`, followed by one note line per
// related span.
std::string format(const Diagnostic& d);

bool has_errors(const std::vector<Diagnostic>& diags) noexcept;

template <typename T>
struct ParseResult {
  std::optional<T> value;  // absent when any error was reported
  std::vector<Diagnostic> diagnostics;

  bool ok() const noexcept { return value.has_value(); }
};

}  // namespace kum::lang

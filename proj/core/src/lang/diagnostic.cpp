#include "kum/lang/diagnostic.hpp"

namespace kum::lang {

std::string_view to_string(Severity s) noexcept {
  switch (s) {
    case Severity::Error: return "error";
    case Severity::Warning: return "warning";
    case Severity::Note: return "note";
  }
  return "?";
}

namespace {
std::string location(const SourceSpan& s) {
  return s.file + ":" + std::to_string(s.line) + ":" + std::to_string(s.column);
}
}  // namespace

std::string format(const Diagnostic& d) {
  std::string out = location(d.span) + ": " + std::string(to_string(d.severity)) + ": " + d.message;
  for (const auto& r : d.related) out += "\n" + location(r) + ": note: previously here";
  return out;
}

bool has_errors(const std::vector<Diagnostic>& diags) noexcept {
  for (const auto& d : diags) {
    if (d.severity == Severity::Error) return true;
  }
  return false;
}

}  // namespace kum::lang

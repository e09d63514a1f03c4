#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "kum/core/graph.hpp"
#include "kum/core/program.hpp"
#include "kum/lang/diagnostic.hpp"

namespace kum::lang {

enum class LintKind {
  NonDeterministic,  // a pattern variable cannot be reached by unique label walks
  DegreeUnsafe,      // some matched graph ends above the degree bound
  NewLabelClash,     // a created node repeats a label next to an already-labeled neighbor
  Shadowed,          // an earlier rule matches everything this rule matches
  RadiusExceeded,    // pattern reaches beyond the declared zone radius
};

std::string_view to_string(LintKind kind) noexcept;

struct LintFinding {
  LintKind kind;
  std::string rule;
  std::string message;
  SourceSpan span;
  // DegreeUnsafe only: a valid graph, with its active node set, on which the
  // rule matches and applying it exceeds the degree bound.
  std::optional<StorageGraph> witness;
};

std::vector<LintFinding> lint_program(const Program& p);

Diagnostic to_diagnostic(const LintFinding& f);

}  // namespace kum::lang

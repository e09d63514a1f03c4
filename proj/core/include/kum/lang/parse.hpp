#pragma once

#include <string>
#include <string_view>

#include "kum/core/graph.hpp"
#include "kum/core/program.hpp"
#include "kum/lang/diagnostic.hpp"

namespace kum::lang {

// Never throws on malformed input; every problem becomes a diagnostic. The
// header is optional: without it the program is named "main", uses degree 3
// and radius 1, and its alphabet is the set of labels the rules mention.
ParseResult<Program> parse_program(std::string_view text, const std::string& file = "<input>");

// .kg text. Structural mistakes are errors; storage-invariant violations
// (checked against `degree_bound`) are reported as warnings and the graph is
// still returned.
ParseResult<StorageGraph> parse_graph(std::string_view text, const std::string& file = "<input>",
                                      std::size_t degree_bound = 3);

// Reserved words cannot be used as variable or label names.
bool is_keyword(std::string_view word) noexcept;

}  // namespace kum::lang

#pragma once

#include <string>

#include "kum/core/graph.hpp"
#include "kum/core/program.hpp"

namespace kum::lang {

std::string print_program(const Program& p);
std::string print_graph(const StorageGraph& g);

// Body of a string literal with quotes, as accepted by the parser.
std::string quote_string(const std::string& text);

}  // namespace kum::lang

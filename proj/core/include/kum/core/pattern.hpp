#pragma once

#include <optional>
#include <string>
#include <vector>

#include "kum/core/address.hpp"
#include "kum/core/program.hpp"

namespace kum {

// Describes why a pattern cannot be resolved by unique label walks from its
// active variable, or nullopt when it can.
std::optional<std::string> address_determinism_problem(const Pattern& pattern);

// Label word of each pattern variable along required edges (BFS from the
// active variable, neighbors visited in label order). Unreachable variables
// are absent.
std::vector<std::pair<VarName, LabelWord>> pattern_addresses(const Pattern& pattern);

// Largest required-edge distance from the active variable; nullopt if some
// variable is unreachable.
std::optional<std::size_t> pattern_depth(const Pattern& pattern);

}  // namespace kum

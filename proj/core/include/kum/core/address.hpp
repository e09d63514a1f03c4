#pragma once

#include <optional>
#include <vector>

#include "kum/core/graph.hpp"

namespace kum {

using LabelWord = std::vector<Label>;

// Shortest label walk from the active node to `target` (lexicographically
// least among shortest walks). Empty word for the active node itself;
// nullopt when unreachable.
std::optional<LabelWord> node_address(const StorageGraph& g, NodeId target);

// Follows `word` from the active node; nullopt when a step has no neighbor
// with that label or more than one.
std::optional<NodeId> resolve_address(const StorageGraph& g, const LabelWord& word);

}  // namespace kum

#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "kum/core/graph.hpp"

namespace kum {

enum class ViolationKind {
  Empty,
  ActiveMissing,
  Disconnected,
  DegreeExceeded,
  AddressingConflict,
};

std::string_view to_string(ViolationKind kind) noexcept;

struct Violation {
  ViolationKind kind;
  std::vector<NodeId> nodes;  // offending nodes, ascending
  std::string message;
};

struct ValidationReport {
  std::vector<Violation> violations;

  bool ok() const noexcept { return violations.empty(); }
  bool has(ViolationKind kind) const noexcept;
  std::string summary() const;
};

ValidationReport validate_graph(const StorageGraph& g, std::size_t degree_bound);

}  // namespace kum

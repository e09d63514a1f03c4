#include "kum/core/validate.hpp"

#include <algorithm>
#include <map>
#include <sstream>

namespace kum {

std::string_view to_string(ViolationKind kind) noexcept {
  switch (kind) {
    case ViolationKind::Empty: return "empty";
    case ViolationKind::ActiveMissing: return "active-missing";
    case ViolationKind::Disconnected: return "disconnected";
    case ViolationKind::DegreeExceeded: return "degree-exceeded";
    case ViolationKind::AddressingConflict: return "addressing-property";
  }
  return "unknown";
}

bool ValidationReport::has(ViolationKind kind) const noexcept {
  return std::any_of(violations.begin(), violations.end(),
                     [kind](const Violation& v) { return v.kind == kind; });
}

std::string ValidationReport::summary() const {
  if (ok()) return "ok";
  std::ostringstream out;
  for (std::size_t i = 0; i < violations.size(); ++i) {
    if (i) out << "; ";
    out << violations[i].message;
  }
  return out.str();
}

ValidationReport validate_graph(const StorageGraph& g, std::size_t degree_bound) {
  ValidationReport report;
  if (g.empty()) {
    report.violations.push_back({ViolationKind::Empty, {}, "graph has no nodes"});
    return report;
  }
  if (!g.contains(g.active())) {
    report.violations.push_back({ViolationKind::ActiveMissing,
                                 {g.active()},
                                 "active node " + std::to_string(to_uint(g.active())) + " is not a member"});
  }

  const NodeId root = g.contains(g.active()) ? g.active() : g.node_ids().front();
  const auto reached = component_of(g, root);
  if (reached.size() != g.node_count()) {
    Violation v{ViolationKind::Disconnected, {}, {}};
    for (NodeId id : g.node_ids()) {
      if (!reached.contains(id)) v.nodes.push_back(id);
    }
    std::ostringstream msg;
    msg << "disconnected: " << v.nodes.size() << " node(s) unreachable from "
        << to_uint(root) << " (first " << to_uint(v.nodes.front()) << ")";
    v.message = msg.str();
    report.violations.push_back(std::move(v));
  }

  for (NodeId id : g.node_ids()) {
    const auto& nbrs = g.neighbors(id);
    if (nbrs.size() > degree_bound) {
      report.violations.push_back({ViolationKind::DegreeExceeded,
                                   {id},
                                   "degree " + std::to_string(nbrs.size()) + " of node " +
                                       std::to_string(to_uint(id)) + " exceeds bound " +
                                       std::to_string(degree_bound)});
    }
    std::map<Label, NodeId> seen;
    for (NodeId n : nbrs) {
      auto [it, inserted] = seen.emplace(g.label(n), n);
      if (!inserted) {
        report.violations.push_back(
            {ViolationKind::AddressingConflict,
             {id, it->second, n},
             "addressing property at " + std::to_string(to_uint(id)) + ": neighbors " +
                 std::to_string(to_uint(it->second)) + " and " + std::to_string(to_uint(n)) +
                 " share label " + g.label(n).name});
      }
    }
  }
  return report;
}

}  // namespace kum

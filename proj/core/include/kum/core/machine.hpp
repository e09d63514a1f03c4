#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "kum/core/error.hpp"
#include "kum/core/graph.hpp"
#include "kum/core/program.hpp"
#include "kum/core/trace.hpp"
#include "kum/core/validate.hpp"

namespace kum {

enum class Status { Running, Halted, Stuck };

std::string_view to_string(Status status) noexcept;

struct MachineState {
  StorageGraph graph;
  std::string output;
  std::uint64_t step_count = 0;
  Status status = Status::Running;
  bool operator==(const MachineState&) const = default;
};

using Binding = std::map<VarName, NodeId>;

// Thrown when a rule application would leave the storage graph invalid. The
// caller's state is untouched.
class InvariantBreach : public Error {
 public:
  InvariantBreach(const std::string& rule, ValidationReport report)
      : Error(ErrorCode::InvariantBreach, "rule " + rule + ": " + report.summary()),
        report_(std::move(report)) {}
  InvariantBreach(const std::string& rule, const std::string& message)
      : Error(ErrorCode::InvariantBreach, "rule " + rule + ": " + message) {}

  const ValidationReport& report() const noexcept { return report_; }

 private:
  ValidationReport report_;
};

struct ApplyOptions {
  std::size_t degree_bound = 3;
  bool hash_ops = false;
  std::size_t hash_size_limit = 64;
};

struct Applied {
  MachineState state;
  std::vector<TraceRecord> records;  // step/rule filled, hash per options
};

// Resolves every pattern variable by unique label walks from the active node.
// Throws Error(AmbiguousPattern) if the pattern cannot be resolved
// deterministically on this graph.
std::optional<Binding> match_rule(const MachineState& state, const RewriteRule& rule);

// Applies the rule's actions in order. Atomic: throws InvariantBreach and
// leaves `state` untouched when the result violates any storage invariant.
Applied apply_rule(const MachineState& state, const RewriteRule& rule, const Binding& binding,
                   const ApplyOptions& options = {});

struct StepResult {
  MachineState state;
  std::vector<TraceRecord> records;
  std::optional<std::string> rule;  // nullopt when the machine became Stuck
};

StepResult step(const MachineState& state, const Program& program, const ApplyOptions& options = {});

enum class StopReason { Halted, Stuck, StepLimit, InvariantBreach };

std::string_view to_string(StopReason reason) noexcept;

struct RunOptions {
  bool hash_ops = true;
  std::size_t hash_size_limit = 64;
};

struct RunResult {
  MachineState final_state;
  EventTrace trace;
  StopReason reason = StopReason::StepLimit;
  std::string breach;  // message when reason == InvariantBreach
};

RunResult run(const MachineState& initial, const Program& program, std::uint64_t max_steps,
              const RunOptions& options = {});

MachineState initial_state(StorageGraph graph);

}  // namespace kum

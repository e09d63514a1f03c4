#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "kum/core/graph.hpp"

namespace kum {

enum class OpKind {
  AddNode,
  RemoveNode,
  AddEdge,
  RemoveEdge,
  Relabel,
  MoveActive,
  Output,
  Halt,
};

std::string_view to_string(OpKind kind) noexcept;
std::optional<OpKind> op_kind_from_string(std::string_view text) noexcept;

struct NodeRef {
  NodeId id;
  Label label;
  bool operator==(const NodeRef&) const = default;
};

// `<id>:<label>`
std::string format_ref(const NodeRef& ref);
bool parse_ref(std::string_view text, NodeRef& ref);

// One primitive graph modification. RELABEL carries the new label in `text`,
// OUTPUT carries the emitted string.
struct PrimOp {
  OpKind kind = OpKind::Halt;
  std::vector<NodeRef> operands;
  std::string text;
  bool operator==(const PrimOp&) const = default;
};

inline constexpr std::string_view kNoHash = "-";

struct TraceRecord {
  std::uint64_t step = 0;
  std::string rule;
  PrimOp op;
  std::string hash{kNoHash};  // canonical hash of the graph after the op
  bool operator==(const TraceRecord&) const = default;
};

using EventTrace = std::vector<TraceRecord>;

// `op=<OP> args=<...>`
std::string format_op(const PrimOp& op);

// `step=<n> rule=<name> op=<OP> args=<...> hash=<hex>`
std::string format_record(const TraceRecord& record);
void write_trace(std::ostream& out, const EventTrace& trace);

// Parses one record line; nullopt with `error` filled on malformed input.
std::optional<TraceRecord> parse_record(std::string_view line, std::string* error = nullptr);
// Blank lines and `#` comments are skipped. Throws Error(ParseError) with a line number.
EventTrace parse_trace(std::string_view text);

// Applies one op to a graph without checking KUM invariants. Throws Error on
// structurally impossible ops (unknown node, duplicate edge, ...).
void apply_op(StorageGraph& g, const PrimOp& op);

}  // namespace kum

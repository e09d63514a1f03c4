#include "kum/core/trace.hpp"

#include <charconv>
#include <ostream>
#include <sstream>

#include "kum/core/error.hpp"

namespace kum {

namespace {

constexpr std::pair<OpKind, std::string_view> kOpNames[] = {
    {OpKind::AddNode, "ADD_NODE"},     {OpKind::RemoveNode, "REMOVE_NODE"}, {OpKind::AddEdge, "ADD_EDGE"},
    {OpKind::RemoveEdge, "REMOVE_EDGE"}, {OpKind::Relabel, "RELABEL"},     {OpKind::MoveActive, "MOVE_ACTIVE"},
    {OpKind::Output, "OUTPUT"},        {OpKind::Halt, "HALT"},
};

std::string quote(const std::string& text) {
  std::string out = "\"";
  for (char c : text) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default: out += c;
    }
  }
  out += '"';
  return out;
}

std::string format_args(const PrimOp& op) {
  switch (op.kind) {
    case OpKind::Output: return quote(op.text);
    case OpKind::Halt: return op.text;
    case OpKind::Relabel: {
      std::string s = op.operands.empty() ? std::string{} : format_ref(op.operands.front());
      return s + ">" + op.text;
    }
    default: {
      std::string s;
      for (std::size_t i = 0; i < op.operands.size(); ++i) {
        if (i) s += ',';
        s += format_ref(op.operands[i]);
      }
      return s;
    }
  }
}

bool fail(std::string* error, const std::string& message) {
  if (error) *error = message;
  return false;
}

bool take_key(std::string_view& rest, std::string_view key, std::string* error) {
  if (rest.substr(0, key.size()) != key) return fail(error, "expected '" + std::string(key) + "'");
  rest.remove_prefix(key.size());
  return true;
}

std::string_view take_word(std::string_view& rest) {
  const auto sp = rest.find(' ');
  std::string_view word = rest.substr(0, sp);
  rest.remove_prefix(sp == std::string_view::npos ? rest.size() : sp);
  while (!rest.empty() && rest.front() == ' ') rest.remove_prefix(1);
  return word;
}

}  // namespace

std::string format_op(const PrimOp& op) {
  return "op=" + std::string(to_string(op.kind)) + " args=" + format_args(op);
}

std::string format_ref(const NodeRef& ref) { return std::to_string(to_uint(ref.id)) + ":" + ref.label.name; }

bool parse_ref(std::string_view text, NodeRef& ref) {
  const auto colon = text.find(':');
  if (colon == std::string_view::npos || colon == 0) return false;
  std::uint32_t id = 0;
  auto [p, ec] = std::from_chars(text.data(), text.data() + colon, id);
  if (ec != std::errc{} || p != text.data() + colon) return false;
  ref.id = NodeId{id};
  ref.label = Label{std::string(text.substr(colon + 1))};
  return !ref.label.name.empty();
}

std::string_view to_string(OpKind kind) noexcept {
  for (const auto& [k, name] : kOpNames) {
    if (k == kind) return name;
  }
  return "?";
}

std::optional<OpKind> op_kind_from_string(std::string_view text) noexcept {
  for (const auto& [k, name] : kOpNames) {
    if (name == text) return k;
  }
  return std::nullopt;
}

std::string format_record(const TraceRecord& r) {
  std::string out = "step=" + std::to_string(r.step) + " rule=" + r.rule + " op=" + std::string(to_string(r.op.kind)) +
                    " args=" + format_args(r.op) + " hash=" + r.hash;
  return out;
}

void write_trace(std::ostream& out, const EventTrace& trace) {
  for (const auto& r : trace) out << format_record(r) << '\n';
}

std::optional<TraceRecord> parse_record(std::string_view line, std::string* error) {
  TraceRecord r;
  std::string_view rest = line;
  if (!take_key(rest, "step=", error)) return std::nullopt;
  const auto step = take_word(rest);
  auto [p, ec] = std::from_chars(step.data(), step.data() + step.size(), r.step);
  if (ec != std::errc{} || p != step.data() + step.size()) {
    fail(error, "bad step number");
    return std::nullopt;
  }
  if (!take_key(rest, "rule=", error)) return std::nullopt;
  r.rule = std::string(take_word(rest));
  if (!take_key(rest, "op=", error)) return std::nullopt;
  const auto opname = take_word(rest);
  const auto kind = op_kind_from_string(opname);
  if (!kind) {
    fail(error, "unknown op '" + std::string(opname) + "'");
    return std::nullopt;
  }
  r.op.kind = *kind;
  if (!take_key(rest, "args=", error)) return std::nullopt;

  std::string_view args;
  if (r.op.kind == OpKind::Output) {
    if (rest.empty() || rest.front() != '"') {
      fail(error, "OUTPUT args must be a quoted string");
      return std::nullopt;
    }
    std::size_t i = 1;
    bool closed = false;
    for (; i < rest.size(); ++i) {
      const char c = rest[i];
      if (c == '\\' && i + 1 < rest.size()) {
        const char n = rest[++i];
        r.op.text += n == 'n' ? '\n' : n == 't' ? '\t' : n;
      } else if (c == '"') {
        closed = true;
        ++i;
        break;
      } else {
        r.op.text += c;
      }
    }
    if (!closed) {
      fail(error, "unterminated string");
      return std::nullopt;
    }
    rest.remove_prefix(i);
    while (!rest.empty() && rest.front() == ' ') rest.remove_prefix(1);
  } else if (!rest.empty() && rest.front() == ' ') {
    while (!rest.empty() && rest.front() == ' ') rest.remove_prefix(1);
  } else if (rest.substr(0, 5) == "hash=") {
    args = {};
  } else {
    args = take_word(rest);
  }

  switch (r.op.kind) {
    case OpKind::Output: break;
    case OpKind::Halt: r.op.text = std::string(args); break;
    case OpKind::Relabel: {
      const auto gt = args.find('>');
      NodeRef ref;
      if (gt == std::string_view::npos || !parse_ref(args.substr(0, gt), ref) || gt + 1 >= args.size()) {
        fail(error, "RELABEL args must be <id>:<label>><label>");
        return std::nullopt;
      }
      r.op.operands.push_back(ref);
      r.op.text = std::string(args.substr(gt + 1));
      break;
    }
    default: {
      std::string_view list = args;
      while (!list.empty()) {
        const auto comma = list.find(',');
        NodeRef ref;
        if (!parse_ref(list.substr(0, comma), ref)) {
          fail(error, "bad operand '" + std::string(list.substr(0, comma)) + "'");
          return std::nullopt;
        }
        r.op.operands.push_back(ref);
        if (comma == std::string_view::npos) break;
        list.remove_prefix(comma + 1);
      }
      const std::size_t want =
          (r.op.kind == OpKind::AddEdge || r.op.kind == OpKind::RemoveEdge) ? 2 : 1;
      if (r.op.operands.size() != want) {
        fail(error, std::string(to_string(r.op.kind)) + " takes " + std::to_string(want) + " operand(s)");
        return std::nullopt;
      }
    }
  }

  if (!take_key(rest, "hash=", error)) return std::nullopt;
  r.hash = std::string(take_word(rest));
  if (!rest.empty()) {
    fail(error, "trailing text");
    return std::nullopt;
  }
  return r;
}

EventTrace parse_trace(std::string_view text) {
  EventTrace trace;
  std::size_t lineno = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text.remove_prefix(nl == std::string_view::npos ? text.size() : nl + 1);
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty() || line.front() == '#') continue;
    std::string err;
    auto r = parse_record(line, &err);
    if (!r) throw Error(ErrorCode::ParseError, "trace line " + std::to_string(lineno) + ": " + err);
    trace.push_back(std::move(*r));
  }
  return trace;
}

void apply_op(StorageGraph& g, const PrimOp& op) {
  switch (op.kind) {
    case OpKind::AddNode: g.add_node(op.operands.at(0).id, op.operands.at(0).label); break;
    case OpKind::RemoveNode: g.remove_node(op.operands.at(0).id); break;
    case OpKind::AddEdge: g.add_edge(op.operands.at(0).id, op.operands.at(1).id); break;
    case OpKind::RemoveEdge: g.remove_edge(op.operands.at(0).id, op.operands.at(1).id); break;
    case OpKind::Relabel: g.relabel(op.operands.at(0).id, Label{op.text}); break;
    case OpKind::MoveActive: g.set_active(op.operands.at(0).id); break;
    case OpKind::Output:
    case OpKind::Halt: break;
  }
}

}  // namespace kum

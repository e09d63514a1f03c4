#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "kum/core/graph.hpp"
#include "kum/core/span.hpp"

namespace kum {

// Source position attached to syntax; excluded from semantic equality.
struct SyntaxSpan {
  SourceSpan value;
  bool operator==(const SyntaxSpan&) const noexcept { return true; }
};

using VarName = std::string;

struct NodeAtom {
  VarName var;
  Label label;
  SyntaxSpan span;
  bool operator==(const NodeAtom&) const = default;
};

// edge(a,b) when required, noedge(a,b) when forbidden.
struct EdgeAtom {
  VarName a;
  VarName b;
  bool forbidden = false;
  SyntaxSpan span;
  bool operator==(const EdgeAtom&) const = default;
};

struct Pattern {
  VarName active_var;
  Label active_label;
  SyntaxSpan active_span;
  std::vector<NodeAtom> nodes;
  std::vector<EdgeAtom> edges;
  bool operator==(const Pattern&) const = default;

  // Label of a pattern variable (active included); nullopt when undeclared.
  std::optional<Label> label_of(const VarName& var) const;
};

namespace act {
struct New {
  VarName var;
  Label label;
  bool operator==(const New&) const = default;
};
struct Delete {
  VarName var;
  bool operator==(const Delete&) const = default;
};
struct Link {
  VarName a, b;
  bool operator==(const Link&) const = default;
};
struct Cut {
  VarName a, b;
  bool operator==(const Cut&) const = default;
};
struct Relabel {
  VarName var;
  Label label;
  bool operator==(const Relabel&) const = default;
};
struct Output {
  std::string text;
  bool operator==(const Output&) const = default;
};
struct Halt {
  bool operator==(const Halt&) const = default;
};
}  // namespace act

struct Action {
  std::variant<act::New, act::Delete, act::Link, act::Cut, act::Relabel, act::Output, act::Halt> op;
  SyntaxSpan span;
  bool operator==(const Action&) const = default;
};

struct RewriteRule {
  std::string name;
  Pattern pattern;
  std::vector<Action> actions;
  std::optional<VarName> move_to;
  SyntaxSpan span;
  SyntaxSpan move_span;
  bool operator==(const RewriteRule&) const = default;
};

struct Program {
  std::string name = "main";
  std::vector<Label> alphabet;  // sorted, unique
  bool alphabet_declared = false;
  std::size_t degree_bound = 3;
  std::size_t radius = 1;
  std::vector<RewriteRule> rules;  // first match wins

  // Whether the alphabet was written out or inferred does not change meaning.
  bool operator==(const Program& o) const {
    return name == o.name && alphabet == o.alphabet && degree_bound == o.degree_bound && radius == o.radius &&
           rules == o.rules;
  }
};

}  // namespace kum

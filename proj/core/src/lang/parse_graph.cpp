#include <charconv>
#include <map>

#include "kum/core/validate.hpp"
#include "kum/lang/parse.hpp"
#include "lexer.hpp"

namespace kum::lang {

using detail::Tok;
using detail::Token;

namespace {

class GraphParser {
 public:
  GraphParser(std::string_view text, const std::string& file, std::size_t degree_bound) : degree_bound_(degree_bound) {
    tokens_ = detail::tokenize(text, file, true, diags_);
  }

  ParseResult<StorageGraph> run() {
    std::vector<const Token*> line;
    for (const Token& t : tokens_) {
      if (t.kind == Tok::Newline || t.kind == Tok::Eof) {
        if (!line.empty()) statement(line);
        line.clear();
      } else {
        line.push_back(&t);
      }
    }
    ParseResult<StorageGraph> result;
    if (!header_) {
      error(tokens_.front().span, "missing 'graph <name> active <id>' header");
    } else if (!node_spans_.contains(active_) && !has_errors(diags_)) {
      error(active_span_, "active node " + std::to_string(to_uint(active_)) + " is not declared");
    }
    if (!has_errors(diags_)) {
      graph_.set_active(active_);
      check_invariants();
      result.value = std::move(graph_);
    }
    result.diagnostics = std::move(diags_);
    return result;
  }

 private:
  void error(const SourceSpan& s, std::string message) {
    diags_.push_back(Diagnostic{Severity::Error, std::move(message), s, {}});
  }

  std::optional<NodeId> id(const Token& t) {
    std::uint32_t v = 0;
    auto [p, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
    if (t.kind != Tok::Int || ec != std::errc{} || v == 0 || v == UINT32_MAX) {
      error(t.span, "expected a node id (positive integer), found '" + t.text + "'");
      return std::nullopt;
    }
    return NodeId{v};
  }

  bool arity(const std::vector<const Token*>& line, std::size_t lo, std::size_t hi, const char* usage) {
    if (line.size() < lo || line.size() > hi) {
      error(line.size() > hi ? line[hi]->span : line.front()->span, std::string("expected '") + usage + "'");
      return false;
    }
    return true;
  }

  bool ident(const Token& t, const char* what) {
    if (t.kind == Tok::Ident) return true;
    error(t.span, std::string("expected ") + what);
    return false;
  }

  void statement(const std::vector<const Token*>& line) {
    const Token& head = *line.front();
    const std::string kw = head.kind == Tok::Ident ? head.text : "";
    if (kw == "graph") {
      if (!arity(line, 4, 4, "graph <name> active <id>") || !ident(*line[1], "graph name")) return;
      if (line[2]->kind != Tok::Ident || line[2]->text != "active") {
        error(line[2]->span, "expected 'active'");
        return;
      }
      if (header_) {
        diags_.push_back(Diagnostic{Severity::Error, "second graph header", head.span, {*header_}});
        return;
      }
      auto a = id(*line[3]);
      if (!a) return;
      header_ = head.span;
      graph_.set_name(line[1]->text);
      active_ = *a;
      active_span_ = line[3]->span;
    } else if (kw == "node") {
      if (!arity(line, 3, 3, "node <id> <label>")) return;
      auto n = id(*line[1]);
      if (!n || !ident(*line[2], "node label")) return;
      auto [it, fresh] = node_spans_.emplace(*n, line[1]->span);
      if (!fresh) {
        diags_.push_back(Diagnostic{Severity::Error, "duplicate node id " + line[1]->text, line[1]->span, {it->second}});
        return;
      }
      graph_.add_node(*n, Label{line[2]->text});
    } else if (kw == "edge") {
      if (!arity(line, 3, 4, "edge <id> <id> [label]")) return;
      auto a = id(*line[1]);
      auto b = id(*line[2]);
      if (!a || !b) return;
      if (line.size() == 4 && !ident(*line[3], "edge label")) return;
      for (std::size_t i : {1, 2}) {
        if (!node_spans_.contains(i == 1 ? *a : *b)) {
          error(line[i]->span, "edge refers to undeclared node " + line[i]->text);
          return;
        }
      }
      if (*a == *b) {
        error(head.span, "self-loop on node " + line[1]->text);
        return;
      }
      auto [it, fresh] = edge_spans_.emplace(make_edge(*a, *b), head.span);
      if (!fresh) {
        diags_.push_back(Diagnostic{Severity::Error,
                                    "duplicate edge " + line[1]->text + " " + line[2]->text, head.span, {it->second}});
        return;
      }
      graph_.add_edge(*a, *b);
      if (line.size() == 4) graph_.set_edge_label(*a, *b, Label{line[3]->text});
    } else {
      error(head.span, "expected 'graph', 'node' or 'edge'");
    }
  }

  void check_invariants() {
    for (const Violation& v : validate_graph(graph_, degree_bound_).violations) {
      SourceSpan span = *header_;
      if (!v.nodes.empty()) {
        if (auto it = node_spans_.find(v.nodes.front()); it != node_spans_.end()) span = it->second;
      }
      diags_.push_back(Diagnostic{Severity::Warning, v.message, span, {}});
    }
  }

  std::size_t degree_bound_;
  std::vector<Diagnostic> diags_;
  std::vector<Token> tokens_;
  StorageGraph graph_;
  std::optional<SourceSpan> header_;
  NodeId active_{0};
  SourceSpan active_span_;
  std::map<NodeId, SourceSpan> node_spans_;
  std::map<Edge, SourceSpan> edge_spans_;
};

}  // namespace

ParseResult<StorageGraph> parse_graph(std::string_view text, const std::string& file, std::size_t degree_bound) {
  return GraphParser(text, file, degree_bound).run();
}

}  // namespace kum::lang

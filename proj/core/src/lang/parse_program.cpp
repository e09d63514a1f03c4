#include <algorithm>
#include <charconv>
#include <map>
#include <set>

#include "kum/lang/parse.hpp"
#include "lexer.hpp"

namespace kum::lang {

using detail::Tok;
using detail::Token;

namespace {

constexpr std::string_view kKeywords[] = {"machine", "labels", "degree", "radius", "rule",    "active",
                                          "node",    "edge",   "noedge", "new",    "del",     "link",
                                          "cut",     "relabel", "out",   "halt",   "move",    "graph"};

// Unwinds to the statement-level recovery point after a syntax error.
struct SyntaxError {};

class ProgramParser {
 public:
  ProgramParser(std::string_view text, const std::string& file) {
    tokens_ = detail::tokenize(text, file, false, diags_);
  }

  ParseResult<Program> run() {
    Program program;
    if (at_keyword("machine")) {
      try {
        header(program);
      } catch (const SyntaxError&) {
        while (!at(Tok::Eof) && !at_keyword("rule")) ++pos_;
      }
    }
    std::map<std::string, SourceSpan> rule_names;
    while (!at(Tok::Eof)) {
      if (!at_keyword("rule")) {
        error(peek().span, "expected 'rule', found " + spell(peek()));
        recover();
        continue;
      }
      const std::size_t before = diags_.size();
      try {
        RewriteRule r = rule(program);
        auto [it, fresh] = rule_names.emplace(r.name, r.span.value);
        if (!fresh) {
          diags_.push_back(Diagnostic{Severity::Error, "duplicate rule name " + r.name, r.span.value, {it->second}});
        }
        if (!has_errors_since(before)) program.rules.push_back(std::move(r));
      } catch (const SyntaxError&) {
        recover();
      }
    }

    if (!program.alphabet_declared) program.alphabet = std::vector<Label>(used_labels_.begin(), used_labels_.end());
    if (program.rules.empty() && !has_errors(diags_)) {
      diags_.push_back(Diagnostic{Severity::Warning, "no rules", tokens_.front().span, {}});
    }
    ParseResult<Program> result;
    if (!has_errors(diags_)) result.value = std::move(program);
    result.diagnostics = std::move(diags_);
    return result;
  }

 private:
  // --- token helpers ---
  const Token& peek(std::size_t ahead = 0) const { return tokens_[std::min(pos_ + ahead, tokens_.size() - 1)]; }
  bool at(Tok kind) const { return peek().kind == kind; }
  bool at_keyword(std::string_view kw) const { return at(Tok::Ident) && peek().text == kw; }

  const Token& take() {
    const Token& t = peek();
    if (pos_ < tokens_.size() - 1) ++pos_;
    return t;
  }

  static std::string spell(const Token& t) {
    switch (t.kind) {
      case Tok::Ident:
      case Tok::Int: return "'" + t.text + "'";
      default: return std::string(detail::describe(t.kind));
    }
  }

  const Token& expect(Tok kind, std::string_view what) {
    if (!at(kind)) {
      error(peek().span, "expected " + std::string(what) + ", found " + spell(peek()));
      throw SyntaxError{};
    }
    return take();
  }

  void expect_keyword(std::string_view kw) {
    if (!at_keyword(kw)) {
      error(peek().span, "expected '" + std::string(kw) + "', found " + spell(peek()));
      throw SyntaxError{};
    }
    take();
  }

  const Token& name(std::string_view what) {
    const Token& t = expect(Tok::Ident, what);
    if (is_keyword(t.text)) {
      error(t.span, "keyword '" + t.text + "' cannot be used as " + std::string(what));
      throw SyntaxError{};
    }
    return t;
  }

  std::size_t integer(std::string_view what) {
    const Token& t = expect(Tok::Int, what);
    std::size_t value = 0;
    auto [p, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), value);
    if (ec != std::errc{} || value > 1'000'000) {
      error(t.span, std::string(what) + " is out of range");
      throw SyntaxError{};
    }
    if (value == 0) error(t.span, std::string(what) + " must be at least 1");
    return value;
  }

  void recover() {
    while (!at(Tok::Eof)) {
      if (at_keyword("rule")) return;
      if (take().kind == Tok::Semi) return;
    }
  }

  void error(const SourceSpan& s, std::string message) {
    diags_.push_back(Diagnostic{Severity::Error, std::move(message), s, {}});
  }

  bool has_errors_since(std::size_t index) const {
    return std::any_of(diags_.begin() + static_cast<std::ptrdiff_t>(index), diags_.end(),
                       [](const Diagnostic& d) { return d.severity == Severity::Error; });
  }

  static SourceSpan join(const SourceSpan& a, const SourceSpan& b) {
    SourceSpan s = a;
    s.length = b.offset + b.length - a.offset;
    return s;
  }

  const SourceSpan& previous_span() const { return tokens_[pos_ == 0 ? 0 : pos_ - 1].span; }

  // --- grammar ---
  void header(Program& p) {
    expect_keyword("machine");
    p.name = name("machine name").text;
    expect_keyword("labels");
    expect(Tok::LBrace, "'{'");
    std::map<std::string, SourceSpan> seen;
    if (!at(Tok::RBrace)) {
      while (true) {
        const Token& l = name("label");
        auto [it, fresh] = seen.emplace(l.text, l.span);
        if (!fresh) {
          diags_.push_back(Diagnostic{Severity::Warning, "label " + l.text + " listed twice", l.span, {it->second}});
        }
        if (!at(Tok::Comma)) break;
        take();
      }
    }
    expect(Tok::RBrace, "'}'");
    for (const auto& [l, _] : seen) p.alphabet.emplace_back(l);
    p.alphabet_declared = !p.alphabet.empty();
    expect_keyword("degree");
    p.degree_bound = integer("degree bound");
    expect_keyword("radius");
    p.radius = integer("radius");
  }

  Label label(const Program& p) {
    const Token& t = name("label");
    if (p.alphabet_declared && !std::binary_search(p.alphabet.begin(), p.alphabet.end(), Label{t.text})) {
      error(t.span, "unknown label " + t.text + " (not in the machine's label set)");
    }
    used_labels_.insert(Label{t.text});
    return Label{t.text};
  }

  struct Scope {
    std::map<VarName, SourceSpan> live;
    std::map<VarName, SourceSpan> deleted;
  };

  void use(const Scope& scope, const Token& var) {
    if (scope.live.contains(var.text)) return;
    if (auto it = scope.deleted.find(var.text); it != scope.deleted.end()) {
      diags_.push_back(Diagnostic{Severity::Error, "variable " + var.text + " used after del", var.span, {it->second}});
    } else {
      error(var.span, "unbound variable " + var.text);
    }
  }

  void bind(Scope& scope, const Token& var) {
    const SourceSpan* previous = nullptr;
    if (auto it = scope.live.find(var.text); it != scope.live.end()) previous = &it->second;
    if (auto it = scope.deleted.find(var.text); it != scope.deleted.end()) previous = &it->second;
    if (previous) {
      diags_.push_back(Diagnostic{Severity::Error, "variable " + var.text + " is already bound", var.span, {*previous}});
      return;
    }
    scope.live.emplace(var.text, var.span);
  }

  std::pair<const Token*, const Token*> var_pair() {
    expect(Tok::LParen, "'('");
    const Token* a = &name("variable");
    expect(Tok::Comma, "','");
    const Token* b = &name("variable");
    expect(Tok::RParen, "')'");
    return {a, b};
  }

  RewriteRule rule(const Program& p) {
    const SourceSpan start = peek().span;
    expect_keyword("rule");
    RewriteRule r;
    r.name = name("rule name").text;
    expect(Tok::Colon, "':'");
    Scope scope;
    pattern(p, r.pattern, scope);
    expect(Tok::Arrow, "'=>'");
    while (true) {
      if (at_keyword("move")) {
        const SourceSpan ms = take().span;
        const Token& v = name("variable");
        use(scope, v);
        r.move_to = v.text;
        r.move_span.value = join(ms, v.span);
        break;
      }
      r.actions.push_back(action(p, scope));
      if (!at(Tok::Comma)) break;
      take();
    }
    expect(Tok::Semi, "';' or ','");
    r.span.value = join(start, previous_span());
    return r;
  }

  void pattern(const Program& p, Pattern& pat, Scope& scope) {
    const SourceSpan start = peek().span;
    expect_keyword("active");
    const Token& av = name("variable");
    expect(Tok::Colon, "':'");
    pat.active_var = av.text;
    pat.active_label = label(p);
    pat.active_span.value = join(start, previous_span());
    bind(scope, av);

    std::vector<std::pair<const Token*, const Token*>> refs;
    std::map<std::pair<VarName, VarName>, std::pair<bool, SourceSpan>> pairs;
    while (at(Tok::Comma)) {
      take();
      const SourceSpan as = peek().span;
      if (at_keyword("node")) {
        take();
        const Token& v = name("variable");
        expect(Tok::Colon, "':'");
        Label l = label(p);
        bind(scope, v);
        pat.nodes.push_back(NodeAtom{v.text, std::move(l), {join(as, previous_span())}});
      } else if (at_keyword("edge") || at_keyword("noedge")) {
        const bool forbidden = take().text == "noedge";
        auto [a, b] = var_pair();
        const SourceSpan span = join(as, previous_span());
        refs.emplace_back(a, b);
        if (a->text == b->text) error(span, "edge atom joins variable " + a->text + " to itself");
        auto key = std::minmax(a->text, b->text);
        auto [it, fresh] = pairs.emplace(std::pair(key.first, key.second), std::pair(forbidden, span));
        if (!fresh) {
          const std::string msg = it->second.first == forbidden
                                      ? "duplicate constraint on " + a->text + " and " + b->text
                                      : "contradictory edge and noedge on " + a->text + " and " + b->text;
          diags_.push_back(Diagnostic{Severity::Error, msg, span, {it->second.second}});
        }
        pat.edges.push_back(EdgeAtom{a->text, b->text, forbidden, {span}});
      } else {
        error(peek().span, "expected 'node', 'edge' or 'noedge', found " + spell(peek()));
        throw SyntaxError{};
      }
    }
    for (const auto& [a, b] : refs) {
      use(scope, *a);
      use(scope, *b);
    }
  }

  Action action(const Program& p, Scope& scope) {
    const SourceSpan start = peek().span;
    Action a;
    if (!at(Tok::Ident)) {
      error(peek().span, "expected an action, found " + spell(peek()));
      throw SyntaxError{};
    }
    const std::string kw = take().text;
    if (kw == "new") {
      const Token& v = name("variable");
      expect(Tok::Colon, "':'");
      Label l = label(p);
      bind(scope, v);
      a.op = act::New{v.text, std::move(l)};
    } else if (kw == "del") {
      const Token& v = name("variable");
      use(scope, v);
      if (auto it = scope.live.find(v.text); it != scope.live.end()) {
        scope.deleted.insert(*it);
        scope.live.erase(it);
      }
      a.op = act::Delete{v.text};
    } else if (kw == "link" || kw == "cut") {
      auto [x, y] = var_pair();
      use(scope, *x);
      use(scope, *y);
      if (x->text == y->text) error(join(start, previous_span()), kw + " joins variable " + x->text + " to itself");
      if (kw == "link") {
        a.op = act::Link{x->text, y->text};
      } else {
        a.op = act::Cut{x->text, y->text};
      }
    } else if (kw == "relabel") {
      const Token& v = name("variable");
      expect(Tok::Colon, "':'");
      Label l = label(p);
      use(scope, v);
      a.op = act::Relabel{v.text, std::move(l)};
    } else if (kw == "out") {
      a.op = act::Output{expect(Tok::String, "string literal").text};
    } else if (kw == "halt") {
      a.op = act::Halt{};
    } else {
      error(previous_span(), "unknown action '" + kw + "'");
      throw SyntaxError{};
    }
    a.span.value = join(start, previous_span());
    return a;
  }

  std::vector<Diagnostic> diags_;
  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
  std::set<Label> used_labels_;
};

}  // namespace

bool is_keyword(std::string_view word) noexcept {
  return std::find(std::begin(kKeywords), std::end(kKeywords), word) != std::end(kKeywords);
}

ParseResult<Program> parse_program(std::string_view text, const std::string& file) {
  return ProgramParser(text, file).run();
}

}  // namespace kum::lang

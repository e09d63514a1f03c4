#include "lexer.hpp"

#include <optional>

namespace kum::lang::detail {

std::string_view describe(Tok kind) noexcept {
  switch (kind) {
    case Tok::Ident: return "identifier";
    case Tok::Int: return "integer";
    case Tok::String: return "string";
    case Tok::Colon: return "':'";
    case Tok::Comma: return "','";
    case Tok::LParen: return "'('";
    case Tok::RParen: return "')'";
    case Tok::LBrace: return "'{'";
    case Tok::RBrace: return "'}'";
    case Tok::Semi: return "';'";
    case Tok::Arrow: return "'=>'";
    case Tok::Newline: return "end of line";
    case Tok::Eof: return "end of input";
  }
  return "?";
}

namespace {

bool ident_start(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_'; }
bool digit(char c) { return c >= '0' && c <= '9'; }
bool ident_char(char c) { return ident_start(c) || digit(c); }

class Lexer {
 public:
  Lexer(std::string_view text, const std::string& file, bool keep_newlines, std::vector<Diagnostic>& diags)
      : text_(text), file_(file), keep_newlines_(keep_newlines), diags_(diags) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    while (pos_ < text_.size()) {
      const char c = text_[pos_];
      if (c == '\n') {
        if (keep_newlines_) out.push_back(make(Tok::Newline, "", pos_, line_, col_, 1));
        advance();
      } else if (c == ' ' || c == '\t' || c == '\r') {
        advance();
      } else if (c == '#') {
        while (pos_ < text_.size() && text_[pos_] != '\n') advance();
      } else if (ident_start(c)) {
        out.push_back(word(Tok::Ident, ident_char));
      } else if (digit(c)) {
        out.push_back(word(Tok::Int, ident_char));
        if (!all_digits(out.back().text)) {
          error(out.back().span, "malformed number '" + out.back().text + "'");
          out.pop_back();
        }
      } else if (c == '"') {
        string_literal(out);
      } else if (c == '=' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '>') {
        out.push_back(make(Tok::Arrow, "=>", pos_, line_, col_, 2));
        advance();
        advance();
      } else if (auto p = punct(c)) {
        out.push_back(make(*p, std::string(1, c), pos_, line_, col_, 1));
        advance();
      } else {
        const SourceSpan s = span(pos_, line_, col_, 1);
        const unsigned byte = static_cast<unsigned char>(c);
        if (byte >= 0x20 && byte < 0x7f) {
          error(s, std::string("unexpected character '") + c + "'");
        } else {
          error(s, "unexpected byte 0x" + hex(byte));
        }
        advance();
      }
    }
    out.push_back(make(Tok::Eof, "", pos_, line_, col_, 0));
    return out;
  }

 private:
  static std::optional<Tok> punct(char c) {
    switch (c) {
      case ':': return Tok::Colon;
      case ',': return Tok::Comma;
      case '(': return Tok::LParen;
      case ')': return Tok::RParen;
      case '{': return Tok::LBrace;
      case '}': return Tok::RBrace;
      case ';': return Tok::Semi;
      default: return std::nullopt;
    }
  }

  static bool all_digits(const std::string& s) {
    for (char c : s) {
      if (!digit(c)) return false;
    }
    return true;
  }

  static std::string hex(unsigned byte) {
    const char* digits = "0123456789abcdef";
    return {digits[byte >> 4], digits[byte & 15]};
  }

  void advance() {
    if (text_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  SourceSpan span(std::size_t offset, std::uint32_t line, std::uint32_t col, std::size_t length) const {
    return SourceSpan{file_, line, col, static_cast<std::uint32_t>(length), static_cast<std::uint32_t>(offset)};
  }

  Token make(Tok kind, std::string text, std::size_t offset, std::uint32_t line, std::uint32_t col,
             std::size_t length) const {
    return Token{kind, std::move(text), span(offset, line, col, length)};
  }

  template <typename Pred>
  Token word(Tok kind, Pred pred) {
    const std::size_t start = pos_;
    const auto line = line_;
    const auto col = col_;
    while (pos_ < text_.size() && pred(text_[pos_])) advance();
    return make(kind, std::string(text_.substr(start, pos_ - start)), start, line, col, pos_ - start);
  }

  void string_literal(std::vector<Token>& out) {
    const std::size_t start = pos_;
    const auto line = line_;
    const auto col = col_;
    advance();
    std::string value;
    bool ok = true;
    while (true) {
      if (pos_ >= text_.size() || text_[pos_] == '\n') {
        error(span(start, line, col, pos_ - start), "unterminated string");
        return;
      }
      const char c = text_[pos_];
      if (c == '"') {
        advance();
        break;
      }
      if (c == '\\') {
        const std::size_t esc = pos_;
        const auto ecol = col_;
        advance();
        if (pos_ >= text_.size() || text_[pos_] == '\n') continue;  // reported as unterminated
        switch (text_[pos_]) {
          case '"': value += '"'; break;
          case '\\': value += '\\'; break;
          case 'n': value += '\n'; break;
          case 't': value += '\t'; break;
          default:
            error(span(esc, line_, ecol, 2), "unknown escape sequence");
            ok = false;
        }
        advance();
        continue;
      }
      value += c;
      advance();
    }
    if (ok) out.push_back(make(Tok::String, std::move(value), start, line, col, pos_ - start));
  }

  void error(const SourceSpan& s, std::string message) {
    diags_.push_back(Diagnostic{Severity::Error, std::move(message), s, {}});
  }

  std::string_view text_;
  const std::string& file_;
  bool keep_newlines_;
  std::vector<Diagnostic>& diags_;
  std::size_t pos_ = 0;
  std::uint32_t line_ = 1;
  std::uint32_t col_ = 1;
};

}  // namespace

std::vector<Token> tokenize(std::string_view text, const std::string& file, bool keep_newlines,
                            std::vector<Diagnostic>& diags) {
  return Lexer(text, file, keep_newlines, diags).run();
}

}  // namespace kum::lang::detail

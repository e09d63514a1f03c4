#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "kum/core/span.hpp"
#include "kum/lang/diagnostic.hpp"

namespace kum::lang::detail {

enum class Tok { Ident, Int, String, Colon, Comma, LParen, RParen, LBrace, RBrace, Semi, Arrow, Newline, Eof };

struct Token {
  Tok kind = Tok::Eof;
  std::string text;  // identifier/integer spelling, or decoded string value
  SourceSpan span;
};

std::string_view describe(Tok kind) noexcept;

// Splits `text` into tokens. Bad bytes and malformed strings become
// diagnostics and are skipped. Newline tokens are produced only when
// `keep_newlines` is set (the graph format is line oriented).
std::vector<Token> tokenize(std::string_view text, const std::string& file, bool keep_newlines,
                            std::vector<Diagnostic>& diags);

}  // namespace kum::lang::detail

#pragma once

#include <cstdint>
#include <string>

namespace kum {

// Location of a token range in a source file. Line and column are 1-based.
struct SourceSpan {
  std::string file;
  std::uint32_t line = 1;
  std::uint32_t column = 1;
  std::uint32_t length = 0;
  std::uint32_t offset = 0;  // byte offset of the first character
};

}  // namespace kum

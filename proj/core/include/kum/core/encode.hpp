#pragma once

#include <string>
#include <vector>

#include "kum/core/graph.hpp"

namespace kum {

// Input words are encoded as a chain hanging off a head node. Position i
// (1-based) of symbol s is labeled `s_t` with t = ((i - 1) mod 3) + 1, so the
// two neighbors of any chain node always carry different tags and the
// addressing property holds for repeated symbols.
inline constexpr const char* kHeadLabel = "HEAD";

Label chain_label(const std::string& symbol, std::size_t position);

// Labels the encoding can use for `symbols`: HEAD plus three tags per symbol.
std::vector<Label> chain_alphabet(const std::vector<std::string>& symbols);

// Throws Error(AlphabetError) for symbols outside `symbols`.
StorageGraph encode_input(const std::vector<std::string>& word, const std::vector<std::string>& symbols);

// Reads the chain starting at the unique HEAD node. Throws Error(InvariantBreach)
// when the graph is not a well-formed chain encoding.
std::vector<std::string> decode_output(const StorageGraph& g);

// Splits "a b c" or "abc" (single-character symbols when no spaces) into symbols.
std::vector<std::string> split_word(const std::string& text);

}  // namespace kum

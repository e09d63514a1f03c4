#include <gtest/gtest.h>

#include <functional>

#include "kum/core/encode.hpp"
#include "kum/core/error.hpp"
#include "kum/core/validate.hpp"

namespace kum {
namespace {

const std::vector<std::string> kSymbols{"a", "b"};

TEST(Encode, EmptyWordIsHeadOnly) {
  const auto g = encode_input({}, kSymbols);
  EXPECT_EQ(g.node_count(), 1u);
  EXPECT_EQ(g.label(g.active()), Label{kHeadLabel});
}

TEST(Encode, ChainShape) {
  const auto g = encode_input({"a", "b"}, kSymbols);
  EXPECT_EQ(g.node_count(), 3u);
  EXPECT_EQ(g.edge_count(), 2u);
  EXPECT_EQ(g.label(NodeId{2}), Label{"a_1"});
  EXPECT_EQ(g.label(NodeId{3}), Label{"b_2"});
  EXPECT_EQ(decode_output(g), (std::vector<std::string>{"a", "b"}));
}

TEST(Encode, RepeatedSymbolsKeepAddressing) {
  const auto g = encode_input({"a", "a", "a", "a"}, kSymbols);
  EXPECT_TRUE(validate_graph(g, 3).ok());
  EXPECT_EQ(g.label(NodeId{5}), Label{"a_1"});
}

TEST(Encode, UnknownSymbol) {
  try {
    encode_input({"a", "z"}, kSymbols);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::AlphabetError);
  }
}

// All words up to length 8 over {a,b}: valid graph, and decoding inverts encoding.
TEST(Encode, RoundTripAllShortWords) {
  std::size_t count = 0;
  std::function<void(std::vector<std::string>&)> walk = [&](std::vector<std::string>& w) {
    const auto g = encode_input(w, kSymbols);
    ASSERT_TRUE(validate_graph(g, 3).ok());
    ASSERT_EQ(decode_output(g), w);
    ++count;
    if (w.size() == 8) return;
    for (const auto& s : kSymbols) {
      w.push_back(s);
      walk(w);
      w.pop_back();
    }
  };
  std::vector<std::string> w;
  walk(w);
  EXPECT_EQ(count, 511u);
}

TEST(Decode, RejectsBrokenChains) {
  auto g = encode_input({"a", "b", "a"}, kSymbols);
  g.relabel(NodeId{3}, "b_1");
  EXPECT_THROW(decode_output(g), Error);
  auto h = encode_input({"a"}, kSymbols);
  h.add_edge(NodeId{2}, h.add_node("b_3"));
  h.add_edge(NodeId{2}, h.add_node("a_2"));
  EXPECT_THROW(decode_output(h), Error);
}

TEST(SplitWord, SpacesOrCharacters) {
  EXPECT_EQ(split_word("ab"), (std::vector<std::string>{"a", "b"}));
  EXPECT_EQ(split_word("one two"), (std::vector<std::string>{"one", "two"}));
  EXPECT_TRUE(split_word("").empty());
}

}  // namespace
}  // namespace kum

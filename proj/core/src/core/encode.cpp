#include "kum/core/encode.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "kum/core/error.hpp"

namespace kum {

Label chain_label(const std::string& symbol, std::size_t position) {
  return Label{symbol + "_" + std::to_string((position - 1) % 3 + 1)};
}

std::vector<Label> chain_alphabet(const std::vector<std::string>& symbols) {
  std::set<Label> labels{Label{kHeadLabel}};
  for (const auto& s : symbols) {
    for (std::size_t t = 1; t <= 3; ++t) labels.insert(chain_label(s, t));
  }
  return {labels.begin(), labels.end()};
}

StorageGraph encode_input(const std::vector<std::string>& word, const std::vector<std::string>& symbols) {
  const std::set<std::string> known(symbols.begin(), symbols.end());
  StorageGraph g("input");
  NodeId prev = g.add_node(Label{kHeadLabel});
  g.set_active(prev);
  for (std::size_t i = 0; i < word.size(); ++i) {
    if (!known.contains(word[i])) {
      throw Error(ErrorCode::AlphabetError, "symbol '" + word[i] + "' at position " + std::to_string(i + 1) +
                                                " is not in the input alphabet");
    }
    const NodeId id = g.add_node(chain_label(word[i], i + 1));
    g.add_edge(prev, id);
    prev = id;
  }
  return g;
}

std::vector<std::string> decode_output(const StorageGraph& g) {
  std::optional<NodeId> head;
  for (NodeId id : g.node_ids()) {
    if (g.label(id).name != kHeadLabel) continue;
    if (head) throw Error(ErrorCode::InvariantBreach, "more than one HEAD node");
    head = id;
  }
  if (!head) throw Error(ErrorCode::InvariantBreach, "no HEAD node");

  std::vector<std::string> word;
  NodeId prev = *head;
  std::optional<NodeId> at;
  if (g.degree(*head) > 1) throw Error(ErrorCode::InvariantBreach, "HEAD has more than one successor");
  if (g.degree(*head) == 1) at = *g.neighbors(*head).begin();
  std::set<NodeId> seen{*head};
  while (at) {
    if (!seen.insert(*at).second) throw Error(ErrorCode::InvariantBreach, "chain contains a cycle");
    const std::string& name = g.label(*at).name;
    const auto us = name.rfind('_');
    const std::size_t pos = word.size() + 1;
    if (us == std::string::npos || name.substr(us + 1) != std::to_string((pos - 1) % 3 + 1)) {
      throw Error(ErrorCode::InvariantBreach, "node " + std::to_string(to_uint(*at)) + " label " + name +
                                                  " does not match chain position " + std::to_string(pos));
    }
    word.push_back(name.substr(0, us));
    std::optional<NodeId> next;
    for (NodeId n : g.neighbors(*at)) {
      if (n == prev) continue;
      if (next) throw Error(ErrorCode::InvariantBreach, "chain branches at node " + std::to_string(to_uint(*at)));
      next = n;
    }
    prev = *at;
    at = next;
  }
  if (seen.size() != g.node_count()) throw Error(ErrorCode::InvariantBreach, "nodes outside the chain");
  return word;
}

std::vector<std::string> split_word(const std::string& text) {
  std::vector<std::string> out;
  if (text.find(' ') != std::string::npos) {
    std::istringstream in(text);
    for (std::string s; in >> s;) out.push_back(s);
  } else {
    for (char c : text) out.emplace_back(1, c);
  }
  return out;
}

}  // namespace kum

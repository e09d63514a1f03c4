#include "kum/core/address.hpp"

#include <map>

namespace kum {

std::optional<LabelWord> node_address(const StorageGraph& g, NodeId target) {
  if (!g.contains(g.active()) || !g.contains(target)) return std::nullopt;
  std::map<NodeId, LabelWord> word{{g.active(), {}}};
  std::vector<NodeId> layer{g.active()};
  while (!layer.empty() && !word.contains(target)) {
    std::map<NodeId, LabelWord> next;
    for (NodeId u : layer) {
      for (NodeId v : g.neighbors(u)) {
        if (word.contains(v)) continue;
        LabelWord candidate = word.at(u);
        candidate.push_back(g.label(v));
        auto it = next.find(v);
        if (it == next.end()) {
          next.emplace(v, std::move(candidate));
        } else if (candidate < it->second) {
          it->second = std::move(candidate);
        }
      }
    }
    layer.clear();
    for (auto& [v, w] : next) {
      layer.push_back(v);
      word.emplace(v, std::move(w));
    }
  }
  auto it = word.find(target);
  if (it == word.end()) return std::nullopt;
  return it->second;
}

std::optional<NodeId> resolve_address(const StorageGraph& g, const LabelWord& word) {
  if (!g.contains(g.active())) return std::nullopt;
  NodeId at = g.active();
  for (const Label& l : word) {
    std::optional<NodeId> next;
    for (NodeId n : g.neighbors(at)) {
      if (g.label(n) != l) continue;
      if (next) return std::nullopt;
      next = n;
    }
    if (!next) return std::nullopt;
    at = *next;
  }
  return at;
}

}  // namespace kum

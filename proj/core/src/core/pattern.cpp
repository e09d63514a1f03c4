#include "kum/core/pattern.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <set>

namespace kum {

std::optional<Label> Pattern::label_of(const VarName& var) const {
  if (var == active_var) return active_label;
  for (const auto& n : nodes) {
    if (n.var == var) return n.label;
  }
  return std::nullopt;
}

namespace {

std::map<VarName, std::vector<VarName>> required_adjacency(const Pattern& p) {
  std::map<VarName, std::vector<VarName>> adj;
  adj[p.active_var];
  for (const auto& n : p.nodes) adj[n.var];
  for (const auto& e : p.edges) {
    if (e.forbidden) continue;
    adj[e.a].push_back(e.b);
    adj[e.b].push_back(e.a);
  }
  return adj;
}

}  // namespace

std::optional<std::string> address_determinism_problem(const Pattern& p) {
  for (const auto& e : p.edges) {
    for (const auto& v : {e.a, e.b}) {
      if (!p.label_of(v)) return "variable " + v + " is not declared in the pattern";
    }
  }
  const auto adj = required_adjacency(p);
  for (const auto& [u, nbrs] : adj) {
    std::map<Label, VarName> seen;
    for (const auto& v : nbrs) {
      auto [it, inserted] = seen.emplace(*p.label_of(v), v);
      if (!inserted && it->second != v) {
        return "variables " + it->second + " and " + v + " are both neighbors of " + u + " labeled " +
               it->first.name;
      }
    }
  }
  std::set<VarName> reached{p.active_var};
  std::deque<VarName> work{p.active_var};
  while (!work.empty()) {
    const auto u = work.front();
    work.pop_front();
    for (const auto& v : adj.at(u)) {
      if (reached.insert(v).second) work.push_back(v);
    }
  }
  for (const auto& [v, _] : adj) {
    if (!reached.contains(v)) return "variable " + v + " is not reachable from " + p.active_var + " by required edges";
  }
  return std::nullopt;
}

std::vector<std::pair<VarName, LabelWord>> pattern_addresses(const Pattern& p) {
  auto adj = required_adjacency(p);
  for (auto& [u, nbrs] : adj) {
    std::sort(nbrs.begin(), nbrs.end(), [&p](const VarName& a, const VarName& b) {
      return std::pair(p.label_of(a).value_or(Label{}), a) < std::pair(p.label_of(b).value_or(Label{}), b);
    });
  }
  std::vector<std::pair<VarName, LabelWord>> out{{p.active_var, {}}};
  std::map<VarName, std::size_t> index{{p.active_var, 0}};
  for (std::size_t i = 0; i < out.size(); ++i) {
    const VarName u = out[i].first;
    for (const auto& v : adj[u]) {
      if (index.contains(v) || !p.label_of(v)) continue;
      LabelWord w = out[i].second;
      w.push_back(*p.label_of(v));
      index[v] = out.size();
      out.emplace_back(v, std::move(w));
    }
  }
  return out;
}

std::optional<std::size_t> pattern_depth(const Pattern& p) {
  const auto addrs = pattern_addresses(p);
  const auto adj = required_adjacency(p);
  if (addrs.size() != adj.size()) return std::nullopt;
  std::size_t depth = 0;
  for (const auto& [_, w] : addrs) depth = std::max(depth, w.size());
  return depth;
}

}  // namespace kum

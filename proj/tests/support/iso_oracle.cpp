#include "iso_oracle.hpp"

#include <algorithm>
#include <map>
#include <numeric>

namespace kum::testing {

bool brute_force_isomorphic(const StorageGraph& a, const StorageGraph& b) {
  if (a.node_count() != b.node_count() || a.edge_count() != b.edge_count()) return false;
  if (a.label(a.active()) != b.label(b.active())) return false;
  std::vector<NodeId> av;
  std::vector<NodeId> bv;
  for (NodeId id : a.node_ids()) {
    if (id != a.active()) av.push_back(id);
  }
  for (NodeId id : b.node_ids()) {
    if (id != b.active()) bv.push_back(id);
  }
  std::sort(bv.begin(), bv.end());
  do {
    std::map<NodeId, NodeId> f{{a.active(), b.active()}};
    bool ok = true;
    for (std::size_t i = 0; i < av.size() && ok; ++i) {
      f[av[i]] = bv[i];
      ok = a.label(av[i]) == b.label(bv[i]);
    }
    if (!ok) continue;
    for (const auto& [x, y] : a.edges()) {
      if (!b.has_edge(f[x], f[y])) {
        ok = false;
        break;
      }
    }
    if (ok) return true;
  } while (std::next_permutation(bv.begin(), bv.end()));
  return false;
}

StorageGraph shuffle_ids(const StorageGraph& g, std::mt19937_64& rng) {
  const auto ids = g.node_ids();
  std::vector<std::uint32_t> pool(ids.size() * 4);
  std::iota(pool.begin(), pool.end(), 1u);
  std::shuffle(pool.begin(), pool.end(), rng);
  std::map<NodeId, NodeId> f;
  for (std::size_t i = 0; i < ids.size(); ++i) f[ids[i]] = NodeId{pool[i]};
  StorageGraph out(g.name());
  // insert in shuffled order so internal container order differs too
  std::vector<NodeId> order = ids;
  std::shuffle(order.begin(), order.end(), rng);
  for (NodeId id : order) out.add_node(f[id], g.label(id));
  for (const auto& [x, y] : g.edges()) out.add_edge(f[x], f[y]);
  if (g.contains(g.active())) out.set_active(f[g.active()]);
  return out;
}

namespace {

bool can_link(const StorageGraph& g, NodeId x, NodeId y, std::size_t bound) {
  if (x == y || g.has_edge(x, y) || g.degree(x) >= bound || g.degree(y) >= bound) return false;
  for (NodeId n : g.neighbors(x)) {
    if (g.label(n) == g.label(y)) return false;
  }
  for (NodeId n : g.neighbors(y)) {
    if (g.label(n) == g.label(x)) return false;
  }
  return true;
}

}  // namespace

StorageGraph random_valid_graph(std::mt19937_64& rng, std::size_t nodes, const std::vector<std::string>& labels,
                                std::size_t degree_bound, double extra_edge_rate) {
  std::uniform_int_distribution<std::size_t> pick_label(0, labels.size() - 1);
  StorageGraph g("random");
  std::vector<NodeId> ids{g.add_node(labels[pick_label(rng)])};
  for (std::size_t attempts = 0; ids.size() < nodes && attempts < nodes * 50; ++attempts) {
    const NodeId parent = ids[std::uniform_int_distribution<std::size_t>(0, ids.size() - 1)(rng)];
    const Label l = labels[pick_label(rng)];
    if (g.degree(parent) >= degree_bound) continue;
    bool clash = false;
    for (NodeId n : g.neighbors(parent)) clash |= g.label(n) == l;
    if (clash) continue;
    const NodeId id = g.add_node(l);
    g.add_edge(parent, id);
    ids.push_back(id);
  }
  std::bernoulli_distribution extra(extra_edge_rate);
  for (NodeId x : ids) {
    for (NodeId y : ids) {
      if (x < y && extra(rng) && can_link(g, x, y, degree_bound)) g.add_edge(x, y);
    }
  }
  g.set_active(ids[std::uniform_int_distribution<std::size_t>(0, ids.size() - 1)(rng)]);
  return g;
}

void enumerate_valid_graphs(std::size_t n, const std::vector<std::string>& labels, std::size_t degree_bound,
                            const std::function<void(const StorageGraph&)>& visit) {
  std::vector<std::size_t> label(n, 0);
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) pairs.emplace_back(i, j);
  }
  // per node: bitmask of labels already seen among neighbors, and degree
  std::vector<std::uint32_t> seen(n, 0);
  std::vector<std::size_t> degree(n, 0);
  std::vector<bool> chosen(pairs.size(), false);

  auto emit = [&] {
    std::vector<std::uint32_t> adj(n, 0);
    for (std::size_t e = 0; e < pairs.size(); ++e) {
      if (!chosen[e]) continue;
      adj[pairs[e].first] |= 1u << pairs[e].second;
      adj[pairs[e].second] |= 1u << pairs[e].first;
    }
    std::uint32_t reach = 1;
    for (std::uint32_t frontier = 1; frontier;) {
      std::uint32_t next = 0;
      for (std::size_t i = 0; i < n; ++i) {
        if (frontier >> i & 1u) next |= adj[i];
      }
      frontier = next & ~reach;
      reach |= next;
    }
    if (reach != (1u << n) - 1) return;
    StorageGraph g("enum");
    for (std::size_t i = 0; i < n; ++i) g.add_node(NodeId{static_cast<std::uint32_t>(i + 1)}, labels[label[i]]);
    for (std::size_t e = 0; e < pairs.size(); ++e) {
      if (chosen[e]) {
        g.add_edge(NodeId{static_cast<std::uint32_t>(pairs[e].first + 1)},
                   NodeId{static_cast<std::uint32_t>(pairs[e].second + 1)});
      }
    }
    g.set_active(NodeId{1});
    visit(g);
  };

  std::function<void(std::size_t)> edges = [&](std::size_t e) {
    if (e == pairs.size()) {
      emit();
      return;
    }
    edges(e + 1);
    const auto [a, b] = pairs[e];
    const std::uint32_t la = 1u << label[a];
    const std::uint32_t lb = 1u << label[b];
    if (degree[a] < degree_bound && degree[b] < degree_bound && !(seen[a] & lb) && !(seen[b] & la)) {
      seen[a] |= lb;
      seen[b] |= la;
      ++degree[a];
      ++degree[b];
      chosen[e] = true;
      edges(e + 1);
      chosen[e] = false;
      --degree[a];
      --degree[b];
      seen[a] &= ~lb;
      seen[b] &= ~la;
    }
  };

  std::function<void(std::size_t)> labels_at = [&](std::size_t i) {
    if (i == n) {
      edges(0);
      return;
    }
    for (std::size_t l = 0; l < labels.size(); ++l) {
      label[i] = l;
      labels_at(i + 1);
    }
  };
  labels_at(0);
}

}  // namespace kum::testing

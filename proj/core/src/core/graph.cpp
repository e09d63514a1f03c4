#include "kum/core/graph.hpp"

#include <algorithm>
#include <deque>

#include "kum/core/error.hpp"

namespace kum {

namespace {

std::string id_str(NodeId id) { return std::to_string(to_uint(id)); }

}  // namespace

StorageGraph::Node& StorageGraph::node(NodeId id) {
  auto it = nodes_.find(id);
  if (it == nodes_.end()) throw Error(ErrorCode::NodeUnknown, "node " + id_str(id));
  return it->second;
}

const StorageGraph::Node& StorageGraph::node(NodeId id) const {
  auto it = nodes_.find(id);
  if (it == nodes_.end()) throw Error(ErrorCode::NodeUnknown, "node " + id_str(id));
  return it->second;
}

NodeId StorageGraph::add_node(Label label) {
  NodeId id{next_id_};
  add_node(id, std::move(label));
  return id;
}

void StorageGraph::add_node(NodeId id, Label label) {
  if (nodes_.contains(id)) throw Error(ErrorCode::InvariantBreach, "duplicate node " + id_str(id));
  nodes_.emplace(id, Node{std::move(label), {}});
  next_id_ = std::max(next_id_, to_uint(id) + 1);
}

void StorageGraph::remove_node(NodeId id) {
  Node& n = node(id);
  for (NodeId other : n.neighbors) {
    nodes_.at(other).neighbors.erase(id);
    edge_labels_.erase(make_edge(id, other));
    --edge_count_;
  }
  nodes_.erase(id);
}

void StorageGraph::relabel(NodeId id, Label label) { node(id).label = std::move(label); }

void StorageGraph::add_edge(NodeId a, NodeId b) {
  if (a == b) throw Error(ErrorCode::InvariantBreach, "self-loop at " + id_str(a));
  Node& na = node(a);
  Node& nb = node(b);
  if (na.neighbors.contains(b)) {
    throw Error(ErrorCode::InvariantBreach, "parallel edge " + id_str(a) + "-" + id_str(b));
  }
  na.neighbors.insert(b);
  nb.neighbors.insert(a);
  ++edge_count_;
}

void StorageGraph::remove_edge(NodeId a, NodeId b) {
  Node& na = node(a);
  Node& nb = node(b);
  if (!na.neighbors.erase(b)) {
    throw Error(ErrorCode::InvariantBreach, "no edge " + id_str(a) + "-" + id_str(b));
  }
  nb.neighbors.erase(a);
  edge_labels_.erase(make_edge(a, b));
  --edge_count_;
}

bool StorageGraph::has_edge(NodeId a, NodeId b) const {
  auto it = nodes_.find(a);
  return it != nodes_.end() && it->second.neighbors.contains(b);
}

void StorageGraph::set_edge_label(NodeId a, NodeId b, Label label) {
  if (!has_edge(a, b)) throw Error(ErrorCode::InvariantBreach, "no edge " + id_str(a) + "-" + id_str(b));
  edge_labels_[make_edge(a, b)] = std::move(label);
}

std::optional<Label> StorageGraph::edge_label(NodeId a, NodeId b) const {
  auto it = edge_labels_.find(make_edge(a, b));
  if (it == edge_labels_.end()) return std::nullopt;
  return it->second;
}

const Label& StorageGraph::label(NodeId id) const { return node(id).label; }

const std::set<NodeId>& StorageGraph::neighbors(NodeId id) const { return node(id).neighbors; }

std::vector<NodeId> StorageGraph::node_ids() const {
  std::vector<NodeId> ids;
  ids.reserve(nodes_.size());
  for (const auto& [id, _] : nodes_) ids.push_back(id);
  return ids;
}

std::vector<Edge> StorageGraph::edges() const {
  std::vector<Edge> out;
  out.reserve(edge_count_);
  for (const auto& [id, n] : nodes_) {
    for (NodeId other : n.neighbors) {
      if (id < other) out.emplace_back(id, other);
    }
  }
  return out;
}

void StorageGraph::set_active(NodeId id) {
  if (!nodes_.contains(id)) throw Error(ErrorCode::NodeUnknown, "active node " + id_str(id));
  active_ = id;
}

bool StorageGraph::operator==(const StorageGraph& other) const {
  return name_ == other.name_ && active_ == other.active_ && nodes_ == other.nodes_ &&
         edge_labels_ == other.edge_labels_;
}

std::set<NodeId> component_of(const StorageGraph& g, NodeId start) {
  std::set<NodeId> seen;
  if (!g.contains(start)) return seen;
  std::deque<NodeId> queue{start};
  seen.insert(start);
  while (!queue.empty()) {
    NodeId u = queue.front();
    queue.pop_front();
    for (NodeId v : g.neighbors(u)) {
      if (seen.insert(v).second) queue.push_back(v);
    }
  }
  return seen;
}

StorageGraph induced_subgraph(const StorageGraph& g, const std::set<NodeId>& keep) {
  StorageGraph out(g.name());
  for (NodeId id : keep) out.add_node(id, g.label(id));
  for (const auto& [a, b] : g.edges()) {
    if (keep.contains(a) && keep.contains(b)) {
      out.add_edge(a, b);
      if (auto l = g.edge_label(a, b)) out.set_edge_label(a, b, *l);
    }
  }
  if (keep.contains(g.active())) {
    out.set_active(g.active());
  } else if (!keep.empty()) {
    out.set_active(*keep.begin());
  }
  return out;
}

}  // namespace kum

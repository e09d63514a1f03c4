#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace kum {

enum class NodeId : std::uint32_t {};

constexpr std::uint32_t to_uint(NodeId id) noexcept { return static_cast<std::uint32_t>(id); }

struct Label {
  std::string name;

  Label() = default;
  Label(std::string n) : name(std::move(n)) {}  // NOLINT(google-explicit-constructor)
  Label(const char* n) : name(n) {}             // NOLINT(google-explicit-constructor)

  auto operator<=>(const Label&) const = default;
};

using Edge = std::pair<NodeId, NodeId>;  // stored with first < second

inline Edge make_edge(NodeId a, NodeId b) { return a < b ? Edge{a, b} : Edge{b, a}; }

// The KUM storage: a labeled undirected simple graph with one active node.
// Structural mutators reject self-loops, parallel edges and unknown ids; the
// global invariants (connectivity, degree bound, addressing property) are
// checked separately by validate_graph because rules may pass through
// transiently invalid states.
class StorageGraph {
 public:
  StorageGraph() = default;
  explicit StorageGraph(std::string name) : name_(std::move(name)) {}

  const std::string& name() const noexcept { return name_; }
  void set_name(std::string name) { name_ = std::move(name); }

  NodeId add_node(Label label);
  void add_node(NodeId id, Label label);
  // Removes the node together with its incident edges.
  void remove_node(NodeId id);
  void relabel(NodeId id, Label label);

  void add_edge(NodeId a, NodeId b);
  void remove_edge(NodeId a, NodeId b);
  bool has_edge(NodeId a, NodeId b) const;

  // Edge labels are carried for the data model only; no core semantics use them.
  void set_edge_label(NodeId a, NodeId b, Label label);
  std::optional<Label> edge_label(NodeId a, NodeId b) const;

  bool contains(NodeId id) const { return nodes_.contains(id); }
  const Label& label(NodeId id) const;
  const std::set<NodeId>& neighbors(NodeId id) const;
  std::size_t degree(NodeId id) const { return neighbors(id).size(); }

  std::size_t node_count() const noexcept { return nodes_.size(); }
  std::size_t edge_count() const noexcept { return edge_count_; }
  bool empty() const noexcept { return nodes_.empty(); }

  std::vector<NodeId> node_ids() const;
  std::vector<Edge> edges() const;

  NodeId active() const noexcept { return active_; }
  void set_active(NodeId id);

  // Smallest id strictly greater than every id ever inserted.
  NodeId next_id() const noexcept { return NodeId{next_id_}; }

  bool operator==(const StorageGraph& other) const;

 private:
  struct Node {
    Label label;
    std::set<NodeId> neighbors;
    bool operator==(const Node&) const = default;
  };

  Node& node(NodeId id);
  const Node& node(NodeId id) const;

  std::string name_;
  std::map<NodeId, Node> nodes_;
  std::map<Edge, Label> edge_labels_;
  std::size_t edge_count_ = 0;
  NodeId active_{0};
  std::uint32_t next_id_ = 1;
};

// Connected component of `start` as a node set; empty when start is absent.
std::set<NodeId> component_of(const StorageGraph& g, NodeId start);

// Induced subgraph on `keep`; active is preserved when kept, else set to the
// smallest kept id.
StorageGraph induced_subgraph(const StorageGraph& g, const std::set<NodeId>& keep);

}  // namespace kum

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "kum/core/graph.hpp"

namespace kum {

inline constexpr std::size_t kMaxCanonicalNodes = 64;

namespace canon {

// Compact rooted vertex-colored graph. Colors are ranks 0..k-1 whose meaning
// (label names) is supplied separately when digesting.
struct DenseGraph {
  std::size_t n = 0;
  std::size_t root = 0;
  std::array<std::uint64_t, kMaxCanonicalNodes> adjacency{};
  std::array<std::uint8_t, kMaxCanonicalNodes> color{};

  void add_edge(std::size_t a, std::size_t b) {
    adjacency[a] |= std::uint64_t{1} << b;
    adjacency[b] |= std::uint64_t{1} << a;
  }
};

// Canonical labeling: order[i] is the vertex placed at canonical position i.
// Position 0 always holds the root.
struct Labeling {
  std::size_t n = 0;
  std::array<std::uint8_t, kMaxCanonicalNodes> order{};
  std::array<std::uint64_t, kMaxCanonicalNodes> rows{};  // permuted adjacency
};

Labeling canonical_labeling(const DenseGraph& g);

struct Digest {
  std::uint64_t hi = 0;
  std::uint64_t lo = 0;
  auto operator<=>(const Digest&) const = default;
};

// Digest of the canonical labeling; color_names[c] names color rank c.
Digest digest(const DenseGraph& g, const Labeling& labeling, const std::vector<std::string>& color_names);

}  // namespace canon

// Hex digest equal for two graphs iff they are isomorphic as labeled graphs
// rooted at the active node. Edge labels do not participate.
// Throws Error(SizeLimit) above `size_limit` nodes (at most 64).
std::string canonical_hash(const StorageGraph& g, std::size_t size_limit = kMaxCanonicalNodes);

// Exact certificate string (no hashing); equal iff isomorphic.
std::string canonical_form(const StorageGraph& g, std::size_t size_limit = kMaxCanonicalNodes);

}  // namespace kum

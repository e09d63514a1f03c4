#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <utility>

#include "kum/core/graph.hpp"
#include "kum/core/program.hpp"

namespace kum::testing {

// Deliberately naive interpreter used as an oracle: matching tries every
// injective assignment of pattern variables to nodes, and the graph is a
// plain map/set pair with no invariant checks beyond the final validation.
struct RefGraph {
  std::map<std::uint32_t, std::string> labels;
  std::set<std::pair<std::uint32_t, std::uint32_t>> edges;  // first < second
  std::uint32_t active = 0;
  std::uint32_t next = 1;
};

RefGraph to_ref(const StorageGraph& g);
StorageGraph from_ref(const RefGraph& g);

enum class RefStatus { Running, Halted, Stuck, Breach };

struct RefResult {
  RefGraph graph;
  std::string output;
  std::uint64_t steps = 0;
  std::uint64_t ops = 0;  // primitive operations emitted, as the machine counts them
  RefStatus status = RefStatus::Running;
};

RefResult reference_run(const StorageGraph& initial, const Program& program, std::uint64_t max_steps);

}  // namespace kum::testing

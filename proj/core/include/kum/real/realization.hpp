#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "kum/core/graph.hpp"
#include "kum/core/trace.hpp"
#include "kum/sim/log.hpp"
#include "kum/sim/scenario.hpp"
#include "kum/sim/state.hpp"

namespace kum::real {

inline constexpr std::size_t kMaxStationaryLabels = 5;
inline constexpr std::size_t kDefaultWindow = 4;

// Injective label <-> color assignment for stationary nodes.
class LabelColorMap {
 public:
  LabelColorMap() = default;
  // Throws Error(TooManyLabels) above five labels, Error(ConfigError) when two
  // labels share a color.
  explicit LabelColorMap(const std::map<std::string, sim::Color>& entries);

  // Distinct labels in sorted order take the colors in descending attractiveness.
  static LabelColorMap automatic(const StorageGraph& g);

  sim::Color color_of(const std::string& label) const;  // Error(ConfigError) when unmapped
  std::optional<std::string> label_of(sim::Color c) const;
  const std::map<std::string, sim::Color>& entries() const noexcept { return to_color_; }

 private:
  std::map<std::string, sim::Color> to_color_;
  std::map<sim::Color, std::string> to_label_;
};

using Layout = std::map<NodeId, sim::CellPos>;

struct CompileOptions {
  std::optional<Layout> layout;  // auto: a circle centered in the arena
  std::optional<LabelColorMap> labels;
  std::uint64_t seed = 42;
  int width = 200;
  int height = 200;
  std::optional<EventTrace> expected;
  std::uint64_t ticks_per_step = 100;  // spacing of scheduled interventions
  double flake_mass = 1000;  // data flakes outlast the default realize budget
};

struct CompiledScenario {
  sim::Scenario scenario;
  LabelColorMap labels;
  Layout layout;
  std::map<NodeId, std::uint32_t> flake_of;  // data node -> flake id in the sim
  std::optional<EventTrace> expected;
  StorageGraph expected_initial;  // the graph `expected` starts from
};

// Every data node gets one flake, except that a single-node graph compiles to
// the start point alone. The start point sits on the active node. RELABEL
// records of the expected trace become PlaceFlake refreshes of that node.
// Throws Error(TooManyLabels), Error(LayoutError).
CompiledScenario compile_scenario(const StorageGraph& data, const CompileOptions& options = {});

// Trace that grows `g` from its active node: breadth-first ADD_NODE/ADD_EDGE
// pairs, then the remaining edges.
EventTrace growth_trace(const StorageGraph& g);

// Drops dynamic leaves and splices out dynamic nodes of degree two, until
// neither remains. The active node is never touched.
StorageGraph normalize(const StorageGraph& g);

// Canonical hash of normalize(g), or "-" when it has no valid active node or is
// too large.
std::string normalized_hash(const StorageGraph& g);

// One record per primitive op, stamped with the tick and the sim op name.
// With `initial`, each record carries normalized_hash of the graph so far.
EventTrace map_events(const std::vector<sim::SimEvent>& events, const StorageGraph* initial = nullptr);

// Applies every non-HALT op of `trace` to `g`.
StorageGraph replay_trace(StorageGraph g, const EventTrace& trace);

struct OpMatch {
  std::size_t expected = 0;
  std::size_t emergent = 0;
  friend bool operator==(const OpMatch&, const OpMatch&) = default;
};

struct ConformanceReport {
  std::vector<OpMatch> matched;
  std::vector<std::size_t> unmatched;  // indices into the expected trace
  std::vector<std::size_t> surplus;    // indices into the emergent trace
  bool isomorphic = false;
  std::string expected_hash;
  std::string emergent_hash;
  std::size_t window = kDefaultWindow;
  std::map<NodeId, NodeId> binding;  // expected id -> emergent id

  bool pass() const noexcept { return unmatched.empty() && isomorphic; }
};

// Greedy order-preserving alignment. Each expected op is looked for among the
// next window + 1 emergent ops; kinds must agree and operands must bind
// injectively between nodes of equal label (edges match either way round).
// The final graphs are compared through the last hash of each trace; two empty
// traces compare equal. `binding` pre-binds nodes, e.g. the start nodes.
ConformanceReport conformance_check(const EventTrace& expected, const EventTrace& emergent,
                                    std::size_t window = kDefaultWindow, std::map<NodeId, NodeId> binding = {});

void write_report_text(std::ostream& out, const ConformanceReport& r, const EventTrace& expected,
                       const EventTrace& emergent);
void write_report_records(std::ostream& out, const ConformanceReport& r, const EventTrace& expected,
                          const EventTrace& emergent);

// Connected component of `initial`. Throws Error(NodeUnknown).
StorageGraph solution_component(const StorageGraph& g, NodeId initial);

struct Realization {
  sim::EventLog log;
  EventTrace emergent;
  StorageGraph final_graph;  // extracted at the stop tick
  ConformanceReport report;
};

// Simulates until no flake is left to occupy, the run halts, or `max_ticks`.
Realization realize(const CompiledScenario& compiled, std::uint64_t max_ticks = 6000,
                    std::size_t window = kDefaultWindow);

// Two equidistant, small southern flakes that run dry next to the start
// flake, and three fresh flakes in a line to the north.
CompiledScenario fig5_scenario(std::uint64_t seed = 42);

}  // namespace kum::real

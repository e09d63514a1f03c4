#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <variant>
#include <vector>

#include "kum/core/graph.hpp"
#include "kum/core/trace.hpp"
#include "kum/sim/state.hpp"

namespace kum::sim {

// Builds tick 0. A start position inside a flake makes the initial node the
// stationary node of that flake. Throws Error(ConfigError).
SimState init_scenario(const Scenario& scenario);

struct FieldBalance {
  double before = 0;
  double after = 0;
  double injected = 0;
  double decayed = 0;
};

// One tick of diffusion (zero-flux walls), decay, absorption at the `sinks`
// cells, then injection by every non-exhausted, unoccupied flake. `decayed`
// counts both removal terms.
FieldBalance field_step(std::vector<double>& chemo, int width, int height, std::span<const Flake> flakes,
                        const Params& params, std::span<const std::size_t> sinks = {});

double sample(const std::vector<double>& field, int width, int height, Vec2 p) noexcept;

struct Propagate {
  double heading = 0;
};
struct Branch {
  double first = 0;
  double second = 0;
};
struct Occupy {
  std::uint32_t flake = 0;
};
struct Retract {};
using TipCommand = std::variant<Propagate, Branch, Occupy, Retract>;

// Scores candidate directions for a tip without moving it. Consumes noise
// draws from the state's tip stream when the noise weight is non-zero.
TipCommand tip_step(Tip& tip, SimState& state);

// Advances one tick and returns the events emitted during it.
// Throws Error(HaltedError) when the state is not Running.
std::vector<SimEvent> sim_step(SimState& state);

// Runs until halted or `max_ticks` ticks have elapsed in total.
void run_until(SimState& state, std::uint64_t max_ticks);

// +1 while floor((t + phase) / period) is even, -1 otherwise.
int flow_sign(const Vein& vein, double t) noexcept;

HaltStatus halt_status(const SimState& state) noexcept;
double ambient_light(const SimState& state) noexcept;
double light_at(const SimState& state, Vec2 p) noexcept;

// Throws Error(HaltedError) after a halt and Error(ConfigError) out of bounds.
// The intervention is stamped with the current tick and logged.
void apply_intervention(SimState& state, const InterventionKind& what);
// Applies scheduled interventions due at the current tick without stepping.
void apply_scheduled(SimState& state);

struct NodeMeta {
  NodeKind kind = NodeKind::Dynamic;
  std::optional<std::uint32_t> flake;
  Vec2 pos;
};

struct ExtractedGraph {
  StorageGraph graph;
  std::map<NodeId, NodeMeta> meta;
};

// Throws Error(EmptyPlasmodium) when no node exists.
ExtractedGraph extract_graph(const SimState& state);

// Strands meeting at a node: incident veins plus live tips growing from it.
int strands(const SimState& state, std::uint32_t node);

struct DegreeStats {
  double average = 0;
  std::size_t max = 0;
  std::map<std::size_t, std::size_t> histogram;
  std::size_t nodes = 0;
  std::size_t edges = 0;
};

DegreeStats degree_stats(const StorageGraph& g);

// Graph ops of one event in trace order.
std::vector<PrimOp> event_ops(const SimEvent& event);
// Initial graph at tick 0: the start node, active.
StorageGraph initial_graph(const SimState& state);

}  // namespace kum::sim

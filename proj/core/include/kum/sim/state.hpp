#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "kum/core/trace.hpp"
#include "kum/sim/rng.hpp"
#include "kum/sim/scenario.hpp"

namespace kum::sim {

struct Vec2 {
  double x = 0;
  double y = 0;
};

struct Flake {
  std::uint32_t id = 0;
  CellPos pos;
  Color color = Color::Uncolored;
  double mass = 0;
  std::string label;
  std::optional<std::uint32_t> node;  // set while a stationary node sits on it
  bool exhausted() const noexcept { return mass <= 0.0; }
  bool occupied() const noexcept { return node.has_value(); }
};

enum class NodeKind : std::uint8_t { Stationary, Dynamic };

struct SimNode {
  std::uint32_t id = 0;
  NodeKind kind = NodeKind::Dynamic;
  std::optional<std::uint32_t> flake;
  Vec2 pos;
  std::string label;
};

struct Tip {
  std::uint32_t id = 0;
  Vec2 pos;
  double heading = 0;  // radians, 0 = +x (east), pi/2 = +y
  std::uint32_t origin = 0;
  std::vector<CellPos> path;  // 4-connected, starts at the origin's cell
  double travelled = 0;       // cells since (re)origin
  int low_ticks = 0;
  std::optional<double> aim;  // direction it was formed for, while it claims one
};

struct Vein {
  std::uint32_t id = 0;
  std::uint32_t a = 0, b = 0;
  std::vector<CellPos> cells;  // from a to b
  double flow_speed = 1;       // mm/s
  double period = 60;          // s
  double phase = 0;            // s, offset into the square wave at formation
  std::uint64_t born = 0;      // tick of formation
  std::uint64_t flips = 0;     // reversals observed so far
  int sign = 1;                // current flow direction, +1 means a -> b
};

enum class HighCommand : std::uint8_t { SearchForNutrients, EscapeLight, FormSclerotium, Fructify };
enum class HaltStatus : std::uint8_t { Running, Sclerotium, Fructify };

std::string_view to_string(HighCommand c) noexcept;
std::string_view to_string(HaltStatus s) noexcept;

enum class SimOp : std::uint8_t { Occupy, Branch, VeinComplete, VeinRetract, NodeAbandoned, ActiveMoved, Halt, Intervene };

std::string_view to_string(SimOp op) noexcept;

struct SimEvent {
  std::uint64_t tick = 0;
  SimOp op = SimOp::Occupy;
  std::vector<NodeRef> nodes;  // OCCUPY: new, origin; VEIN_*: a, b; ACTIVE_MOVED: from, to
  std::uint32_t ref = 0;       // flake id (OCCUPY) or vein id (VEIN_*)
  std::string text;            // HALT mode, BRANCH position, INTERVENE payload
  friend bool operator==(const SimEvent&, const SimEvent&) = default;
};

struct SimState {
  Scenario scenario;
  int width = 0;
  int height = 0;
  std::vector<double> chemo;
  std::vector<double> light;
  std::vector<LightRegion> lights;

  std::vector<Flake> flakes;
  std::map<std::uint32_t, SimNode> nodes;
  std::map<std::uint32_t, Vein> veins;
  std::vector<Tip> tips;  // ascending id

  NodeRef start_node{NodeId{1}, Label{std::string(kDynamicLabel)}};
  std::uint32_t active = 0;
  HighCommand command = HighCommand::SearchForNutrients;
  HaltStatus status = HaltStatus::Running;
  std::uint64_t tick = 0;
  std::uint64_t idle = 0;  // consecutive ticks without any live tip

  std::uint32_t next_node = 1;
  std::uint32_t next_vein = 1;
  std::uint32_t next_tip = 1;
  std::uint32_t next_flake = 1;
  Stream tip_rng;
  Stream vein_rng;

  // Occupancy grids (0 = empty).
  std::vector<std::uint32_t> node_at;
  std::vector<std::uint32_t> vein_at;
  std::vector<std::uint32_t> tip_at;

  std::vector<SimEvent> events;  // the whole log, tick order
  std::size_t applied_interventions = 0;

  std::size_t index(int x, int y) const noexcept {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width) + static_cast<std::size_t>(x);
  }
  std::size_t index(CellPos c) const noexcept { return index(c.x, c.y); }
  bool running() const noexcept { return status == HaltStatus::Running; }
};

}  // namespace kum::sim

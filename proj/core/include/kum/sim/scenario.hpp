#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "kum/sim/params.hpp"

namespace kum::sim {

struct CellPos {
  int x = 0;
  int y = 0;
  friend bool operator==(const CellPos&, const CellPos&) = default;
};

// Axis-aligned rectangle of cells, inclusive of both corners.
struct LightRegion {
  int x0 = 0, y0 = 0, x1 = 0, y1 = 0;
  double intensity = 1.0;
  friend bool operator==(const LightRegion&, const LightRegion&) = default;
};

struct FlakeSpec {
  CellPos pos;
  Color color = Color::Uncolored;
  std::optional<double> mass;     // defaults to Params::flake_mass
  std::optional<std::string> label;  // overrides the color label map
  friend bool operator==(const FlakeSpec&, const FlakeSpec&) = default;
};

struct PlaceFlake {
  FlakeSpec flake;
  friend bool operator==(const PlaceFlake&, const PlaceFlake&) = default;
};
struct PlaceLight {
  LightRegion region;
  friend bool operator==(const PlaceLight&, const PlaceLight&) = default;
};
// Clears every light region.
struct RemoveLight {
  friend bool operator==(const RemoveLight&, const RemoveLight&) = default;
};

using InterventionKind = std::variant<PlaceFlake, PlaceLight, RemoveLight>;

struct Intervention {
  std::uint64_t tick = 0;  // applied at the start of this tick
  InterventionKind what;
  friend bool operator==(const Intervention&, const Intervention&) = default;
};

// Label of branch and fusion points, and of a start point off any flake.
inline constexpr std::string_view kDynamicLabel = "_dyn";

struct Scenario {
  std::string name = "scenario";
  int width = 200;
  int height = 200;
  double cell_mm = 0.5;
  double dt = 1.0;
  Params params;
  std::vector<FlakeSpec> flakes;
  CellPos start{100, 100};
  std::vector<LightRegion> lights;
  std::uint64_t seed = 42;
  std::vector<Intervention> interventions;  // sorted by tick, stable
  std::map<Color, std::string> labels;      // color -> stationary label
  std::string start_label{kDynamicLabel};

  // Label for a flake: its own label, else the color map, else the color name.
  std::string label_for(const FlakeSpec& f) const;

  // Throws Error(ConfigError).
  void validate() const;
};

bool in_bounds(const Scenario& s, CellPos p) noexcept;

void to_json(nlohmann::json& j, const Intervention& i);
Intervention intervention_from_json(const nlohmann::json& j);
void to_json(nlohmann::json& j, const Scenario& s);
// Missing keys take defaults; malformed input is ConfigError.
Scenario scenario_from_json(const nlohmann::json& j);
Scenario load_scenario(const std::string& path);

}  // namespace kum::sim

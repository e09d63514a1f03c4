#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include <nlohmann/json_fwd.hpp>

namespace kum::sim {

// Flake coloring classes, listed in descending attractiveness.
enum class Color : std::uint8_t { Uncolored, Green, Yellow, Blue, Red };

inline constexpr std::array<Color, 5> kAllColors{Color::Uncolored, Color::Green, Color::Yellow, Color::Blue,
                                                 Color::Red};

std::string_view to_string(Color c) noexcept;
std::optional<Color> color_from_string(std::string_view text) noexcept;

// All tunables of the simulator. Lengths are in cells unless the name says
// mm; times in seconds unless the name says ticks.
struct Params {
  // chemoattractant field
  double kappa = 0.2;           // diffusion coefficient per substep (explicit stencil, <= 0.25)
  int diffusion_substeps = 4;   // substeps per tick
  double lambda = 1e-4;         // decay rate per tick
  double sigma = 1.0;           // injection per tick of an attract-1.0 flake
  double absorb = 0.5;          // fraction removed per tick under plasmodium nodes
  std::array<double, 5> attract{1.0, 0.8, 0.6, 0.6, 0.3};

  // tips
  double tip_speed_mm_s = 0.2;
  int directions = 16;
  double sensor_distance = 3.0;
  double w_gradient = 4.0;
  double w_persistence = 0.35;
  double w_noise = 0.08;
  double w_light = 0.5;
  double w_light_escape = 20.0;
  double branch_ratio = 0.9;            // theta
  double branch_separation_deg = 60.0;  // min angle between the two modes
  double branch_min_travel = 8.0;       // cells a tip covers before it may branch
  int tip_cap = 16;
  double retract_floor = 1e-4;
  int retract_ticks = 30;  // tau

  // geometry
  double flake_radius = 2.0;
  double node_radius = 2.0;

  // tip formation at the active node
  double formation_radius = 6.0;  // inner sensing ring
  double formation_outer = 12.0;  // outer sensing ring
  double formation_rise = 0.05;   // outer/inner - 1 needed to call a direction rising
  int ring_directions = 32;
  double formation_threshold = 0.03;
  int formation_patience = 150;  // idle ticks after which the threshold is waived
  double claim_cone_deg = 25.0;
  double branch_offset = 3.0;

  // flakes, light, halting
  double depletion_rate = 0.1;  // rho, mass units per second while occupied
  double flake_mass = 100.0;
  double escape_light = 0.25;
  double fructify_light = 0.5;  // L_fruct

  // veins
  double flow_speed_min = 1.0;  // mm/s
  double flow_speed_max = 3.0;
  double reversal_min = 60.0;  // s
  double reversal_max = 180.0;

  double attract_of(Color c) const { return attract[static_cast<std::size_t>(c)]; }

  // Throws Error(ConfigError) on out-of-range values, an unstable stencil, or
  // an attract table that breaks Uncolored > Green > Yellow = Blue > Red.
  void validate() const;
};

void to_json(nlohmann::json& j, const Params& p);
// Applies the keys present in `j` on top of `p`; unknown keys are ConfigError.
void apply_overrides(Params& p, const nlohmann::json& j);

}  // namespace kum::sim

#include "kum/sim/params.hpp"

#include <cmath>
#include <functional>
#include <map>

#include <nlohmann/json.hpp>

#include "kum/core/error.hpp"

namespace kum::sim {

namespace {

constexpr std::array<std::string_view, 5> kColorNames{"Uncolored", "Green", "Yellow", "Blue", "Red"};

[[noreturn]] void bad(const std::string& msg) { throw Error(ErrorCode::ConfigError, msg); }

void positive(double v, const char* name) {
  if (!(v > 0) || !std::isfinite(v)) bad(std::string(name) + " must be positive");
}

void non_negative(double v, const char* name) {
  if (!(v >= 0) || !std::isfinite(v)) bad(std::string(name) + " must be non-negative");
}

// Field name -> accessor, shared by serialization and overrides.
const std::map<std::string, double Params::*>& double_fields() {
  static const std::map<std::string, double Params::*> fields{
      {"kappa", &Params::kappa},
      {"lambda", &Params::lambda},
      {"sigma", &Params::sigma},
      {"absorb", &Params::absorb},
      {"tip_speed_mm_s", &Params::tip_speed_mm_s},
      {"sensor_distance", &Params::sensor_distance},
      {"w_gradient", &Params::w_gradient},
      {"w_persistence", &Params::w_persistence},
      {"w_noise", &Params::w_noise},
      {"w_light", &Params::w_light},
      {"w_light_escape", &Params::w_light_escape},
      {"branch_ratio", &Params::branch_ratio},
      {"branch_separation_deg", &Params::branch_separation_deg},
      {"branch_min_travel", &Params::branch_min_travel},
      {"retract_floor", &Params::retract_floor},
      {"flake_radius", &Params::flake_radius},
      {"node_radius", &Params::node_radius},
      {"formation_radius", &Params::formation_radius},
      {"formation_outer", &Params::formation_outer},
      {"formation_rise", &Params::formation_rise},
      {"formation_threshold", &Params::formation_threshold},
      {"claim_cone_deg", &Params::claim_cone_deg},
      {"branch_offset", &Params::branch_offset},
      {"depletion_rate", &Params::depletion_rate},
      {"flake_mass", &Params::flake_mass},
      {"escape_light", &Params::escape_light},
      {"fructify_light", &Params::fructify_light},
      {"flow_speed_min", &Params::flow_speed_min},
      {"flow_speed_max", &Params::flow_speed_max},
      {"reversal_min", &Params::reversal_min},
      {"reversal_max", &Params::reversal_max},
  };
  return fields;
}

const std::map<std::string, int Params::*>& int_fields() {
  static const std::map<std::string, int Params::*> fields{
      {"diffusion_substeps", &Params::diffusion_substeps},
      {"directions", &Params::directions},
      {"tip_cap", &Params::tip_cap},
      {"retract_ticks", &Params::retract_ticks},
      {"ring_directions", &Params::ring_directions},
      {"formation_patience", &Params::formation_patience},
  };
  return fields;
}

}  // namespace

std::string_view to_string(Color c) noexcept { return kColorNames[static_cast<std::size_t>(c)]; }

std::optional<Color> color_from_string(std::string_view text) noexcept {
  for (std::size_t i = 0; i < kColorNames.size(); ++i)
    if (kColorNames[i] == text) return static_cast<Color>(i);
  return std::nullopt;
}

void Params::validate() const {
  non_negative(kappa, "kappa");
  if (kappa > 0.25) bad("kappa must be at most 0.25 for a stable explicit stencil");
  if (diffusion_substeps < 1) bad("diffusion_substeps must be at least 1");
  non_negative(lambda, "lambda");
  if (lambda >= 1) bad("lambda must be below 1");
  non_negative(sigma, "sigma");
  for (double a : attract)
    if (!(a > 0 && a <= 1)) bad("attract values must lie in (0, 1]");
  const auto at = [&](Color c) { return attract_of(c); };
  if (!(at(Color::Uncolored) > at(Color::Green) && at(Color::Green) > at(Color::Yellow) &&
        at(Color::Yellow) == at(Color::Blue) && at(Color::Blue) > at(Color::Red)))
    bad("attract must satisfy Uncolored > Green > Yellow = Blue > Red");
  positive(tip_speed_mm_s, "tip_speed_mm_s");
  if (directions < 4) bad("directions must be at least 4");
  positive(sensor_distance, "sensor_distance");
  non_negative(w_gradient, "w_gradient");
  non_negative(w_persistence, "w_persistence");
  non_negative(w_noise, "w_noise");
  non_negative(w_light, "w_light");
  non_negative(w_light_escape, "w_light_escape");
  if (!(branch_ratio > 0 && branch_ratio <= 1)) bad("branch_ratio must lie in (0, 1]");
  non_negative(branch_separation_deg, "branch_separation_deg");
  non_negative(branch_min_travel, "branch_min_travel");
  if (tip_cap < 1) bad("tip_cap must be at least 1");
  non_negative(retract_floor, "retract_floor");
  if (retract_ticks < 1) bad("retract_ticks must be at least 1");
  positive(flake_radius, "flake_radius");
  positive(node_radius, "node_radius");
  positive(formation_radius, "formation_radius");
  if (!(formation_outer > formation_radius)) bad("formation_outer must exceed formation_radius");
  non_negative(formation_rise, "formation_rise");
  if (!(absorb >= 0 && absorb <= 1)) bad("absorb must lie in [0, 1]");
  if (ring_directions < 4) bad("ring_directions must be at least 4");
  if (formation_patience < 0) bad("formation_patience must be non-negative");
  non_negative(formation_threshold, "formation_threshold");
  non_negative(claim_cone_deg, "claim_cone_deg");
  positive(branch_offset, "branch_offset");
  non_negative(depletion_rate, "depletion_rate");
  non_negative(flake_mass, "flake_mass");
  if (!(escape_light >= 0 && escape_light <= 1)) bad("escape_light must lie in [0, 1]");
  if (!(fructify_light >= 0 && fructify_light <= 1)) bad("fructify_light must lie in [0, 1]");
  if (!(flow_speed_min >= 1 && flow_speed_min <= flow_speed_max && flow_speed_max <= 3))
    bad("flow speed range must lie within [1, 3] mm/s");
  if (!(reversal_min >= 60 && reversal_min <= reversal_max && reversal_max <= 180))
    bad("reversal period range must lie within [60, 180] s");
}

void to_json(nlohmann::json& j, const Params& p) {
  j = nlohmann::json::object();
  for (const auto& [name, field] : double_fields()) j[name] = p.*field;
  for (const auto& [name, field] : int_fields()) j[name] = p.*field;
  auto& a = j["attract"];
  for (Color c : kAllColors) a[std::string(to_string(c))] = p.attract_of(c);
}

void apply_overrides(Params& p, const nlohmann::json& j) {
  if (!j.is_object()) bad("params must be an object");
  const auto doubles = double_fields();
  const auto ints = int_fields();
  for (const auto& [key, value] : j.items()) {
    if (key == "attract") {
      if (!value.is_object()) bad("attract must be an object keyed by color");
      for (const auto& [cname, v] : value.items()) {
        const auto c = color_from_string(cname);
        if (!c) bad("unknown color '" + cname + "'");
        if (!v.is_number()) bad("attract." + cname + " must be a number");
        p.attract[static_cast<std::size_t>(*c)] = v.get<double>();
      }
    } else if (auto d = doubles.find(key); d != doubles.end()) {
      if (!value.is_number()) bad("params." + key + " must be a number");
      p.*(d->second) = value.get<double>();
    } else if (auto i = ints.find(key); i != ints.end()) {
      if (!value.is_number_integer()) bad("params." + key + " must be an integer");
      p.*(i->second) = value.get<int>();
    } else {
      bad("unknown parameter '" + key + "'");
    }
  }
}

}  // namespace kum::sim

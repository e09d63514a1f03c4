#include "kum/sim/scenario.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "kum/core/error.hpp"

namespace kum::sim {

using nlohmann::json;

namespace {

[[noreturn]] void bad(const std::string& msg) { throw Error(ErrorCode::ConfigError, msg); }

const json& require(const json& j, const char* key, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) bad(where + ": missing '" + key + "'");
  return j.at(key);
}

int get_int(const json& j, const char* key, const std::string& where) {
  const json& v = require(j, key, where);
  if (!v.is_number_integer()) bad(where + ": '" + key + "' must be an integer");
  return v.get<int>();
}

double get_number(const json& j, const char* key, double fallback, const std::string& where) {
  if (!j.contains(key)) return fallback;
  const json& v = j.at(key);
  if (!v.is_number()) bad(where + ": '" + key + "' must be a number");
  return v.get<double>();
}

Color get_color(const json& j, const std::string& where) {
  if (!j.contains("color")) return Color::Uncolored;
  const json& v = j.at("color");
  if (!v.is_string()) bad(where + ": 'color' must be a string");
  auto c = color_from_string(v.get<std::string>());
  if (!c) bad(where + ": unknown color '" + v.get<std::string>() + "'");
  return *c;
}

void flake_to_json(json& j, const FlakeSpec& f) {
  j["x"] = f.pos.x;
  j["y"] = f.pos.y;
  j["color"] = std::string(to_string(f.color));
  if (f.mass) j["mass"] = *f.mass;
  if (f.label) j["label"] = *f.label;
}

FlakeSpec flake_from_json(const json& j, const std::string& where) {
  if (!j.is_object()) bad(where + ": expected an object");
  FlakeSpec f;
  f.pos = {get_int(j, "x", where), get_int(j, "y", where)};
  f.color = get_color(j, where);
  if (j.contains("mass")) f.mass = get_number(j, "mass", 0, where);
  if (j.contains("label")) {
    if (!j.at("label").is_string()) bad(where + ": 'label' must be a string");
    f.label = j.at("label").get<std::string>();
  }
  return f;
}

void region_to_json(json& j, const LightRegion& r) {
  j["x0"] = r.x0;
  j["y0"] = r.y0;
  j["x1"] = r.x1;
  j["y1"] = r.y1;
  j["intensity"] = r.intensity;
}

LightRegion region_from_json(const json& j, const std::string& where) {
  if (!j.is_object()) bad(where + ": expected an object");
  return {get_int(j, "x0", where), get_int(j, "y0", where), get_int(j, "x1", where), get_int(j, "y1", where),
          get_number(j, "intensity", 1.0, where)};
}

}  // namespace

bool in_bounds(const Scenario& s, CellPos p) noexcept {
  return p.x >= 0 && p.y >= 0 && p.x < s.width && p.y < s.height;
}

std::string Scenario::label_for(const FlakeSpec& f) const {
  if (f.label) return *f.label;
  if (auto it = labels.find(f.color); it != labels.end()) return it->second;
  return std::string(to_string(f.color));
}

void Scenario::validate() const {
  if (width < 1 || height < 1) bad("arena dimensions must be at least 1");
  if (!(cell_mm > 0) || !(dt > 0)) bad("cell_mm and dt must be positive");
  params.validate();
  if (!in_bounds(*this, start)) bad("start position out of bounds");
  std::set<std::pair<int, int>> cells;
  for (const auto& f : flakes) {
    if (!in_bounds(*this, f.pos)) bad("flake out of bounds");
    if (!cells.emplace(f.pos.x, f.pos.y).second)
      bad("duplicate flake cell (" + std::to_string(f.pos.x) + ", " + std::to_string(f.pos.y) + ")");
    if (f.mass && !(*f.mass >= 0)) bad("flake mass must be non-negative");
  }
  const auto check_region = [&](const LightRegion& r) {
    if (!in_bounds(*this, {r.x0, r.y0}) || !in_bounds(*this, {r.x1, r.y1}) || r.x0 > r.x1 || r.y0 > r.y1)
      bad("light region out of bounds");
    if (!(r.intensity >= 0 && r.intensity <= 1)) bad("light intensity must lie in [0, 1]");
  };
  for (const auto& r : lights) check_region(r);
  for (std::size_t i = 0; i < interventions.size(); ++i) {
    if (i > 0 && interventions[i].tick < interventions[i - 1].tick) bad("interventions must be sorted by tick");
    if (auto* pf = std::get_if<PlaceFlake>(&interventions[i].what)) {
      if (!in_bounds(*this, pf->flake.pos)) bad("intervention flake out of bounds");
      if (pf->flake.mass && !(*pf->flake.mass >= 0)) bad("flake mass must be non-negative");
    } else if (auto* pl = std::get_if<PlaceLight>(&interventions[i].what)) {
      check_region(pl->region);
    }
  }
  if (start_label.empty()) bad("start_label must not be empty");
  for (const auto& [c, l] : labels)
    if (l.empty()) bad("empty label for color " + std::string(to_string(c)));
}

void to_json(json& j, const Intervention& i) {
  j = json::object();
  j["tick"] = i.tick;
  std::visit(
      [&](const auto& w) {
        using T = std::decay_t<decltype(w)>;
        if constexpr (std::is_same_v<T, PlaceFlake>) {
          j["type"] = "PlaceFlake";
          flake_to_json(j, w.flake);
        } else if constexpr (std::is_same_v<T, PlaceLight>) {
          j["type"] = "PlaceLight";
          region_to_json(j, w.region);
        } else {
          j["type"] = "RemoveLight";
        }
      },
      i.what);
}

Intervention intervention_from_json(const json& j) {
  const std::string where = "intervention";
  if (!j.is_object()) bad(where + ": expected an object");
  Intervention out;
  if (j.contains("tick")) {
    if (!j.at("tick").is_number_unsigned() && !j.at("tick").is_number_integer()) bad(where + ": bad tick");
    if (j.at("tick").get<long long>() < 0) bad(where + ": tick must be non-negative");
    out.tick = j.at("tick").get<std::uint64_t>();
  }
  const json& type = require(j, "type", where);
  if (!type.is_string()) bad(where + ": 'type' must be a string");
  const auto t = type.get<std::string>();
  if (t == "PlaceFlake")
    out.what = PlaceFlake{flake_from_json(j, where)};
  else if (t == "PlaceLight")
    out.what = PlaceLight{region_from_json(j, where)};
  else if (t == "RemoveLight")
    out.what = RemoveLight{};
  else
    bad(where + ": unknown type '" + t + "'");
  return out;
}

void to_json(json& j, const Scenario& s) {
  j = json::object();
  j["name"] = s.name;
  j["arena"] = {{"width", s.width}, {"height", s.height}, {"cell_mm", s.cell_mm}, {"dt", s.dt}};
  j["params"] = s.params;
  j["seed"] = s.seed;
  j["start"] = {{"x", s.start.x}, {"y", s.start.y}};
  j["start_label"] = s.start_label;
  json labels = json::object();
  for (const auto& [c, l] : s.labels) labels[std::string(to_string(c))] = l;
  j["labels"] = labels;
  json flakes = json::array();
  for (const auto& f : s.flakes) {
    json fj;
    flake_to_json(fj, f);
    flakes.push_back(fj);
  }
  j["flakes"] = flakes;
  json lights = json::array();
  for (const auto& r : s.lights) {
    json rj;
    region_to_json(rj, r);
    lights.push_back(rj);
  }
  j["light"] = lights;
  json iv = json::array();
  for (const auto& i : s.interventions) iv.push_back(i);
  j["interventions"] = iv;
}

Scenario scenario_from_json(const json& j) {
  if (!j.is_object()) bad("scenario must be a JSON object");
  static const std::set<std::string> known{"name",   "arena", "params",      "seed",          "start",
                                           "labels", "flakes", "start_label", "interventions", "light"};
  for (const auto& [key, _] : j.items())
    if (!known.contains(key)) bad("unknown scenario key '" + key + "'");
  Scenario s;
  if (j.contains("name")) {
    if (!j.at("name").is_string()) bad("'name' must be a string");
    s.name = j.at("name").get<std::string>();
  }
  if (j.contains("arena")) {
    const json& a = j.at("arena");
    if (!a.is_object()) bad("'arena' must be an object");
    if (a.contains("width")) s.width = get_int(a, "width", "arena");
    if (a.contains("height")) s.height = get_int(a, "height", "arena");
    s.cell_mm = get_number(a, "cell_mm", s.cell_mm, "arena");
    s.dt = get_number(a, "dt", s.dt, "arena");
  }
  if (j.contains("params")) apply_overrides(s.params, j.at("params"));
  if (j.contains("seed")) {
    const json& seed = j.at("seed");
    if (!seed.is_number_unsigned() && !(seed.is_number_integer() && seed.get<long long>() >= 0))
      bad("'seed' must be a non-negative integer");
    s.seed = j.at("seed").get<std::uint64_t>();
  }
  if (j.contains("start")) s.start = {get_int(j.at("start"), "x", "start"), get_int(j.at("start"), "y", "start")};
  if (j.contains("start_label")) {
    if (!j.at("start_label").is_string()) bad("'start_label' must be a string");
    s.start_label = j.at("start_label").get<std::string>();
  }
  if (j.contains("labels")) {
    if (!j.at("labels").is_object()) bad("'labels' must be an object keyed by color");
    for (const auto& [cname, l] : j.at("labels").items()) {
      auto c = color_from_string(cname);
      if (!c) bad("labels: unknown color '" + cname + "'");
      if (!l.is_string()) bad("labels: values must be strings");
      s.labels[*c] = l.get<std::string>();
    }
  }
  if (j.contains("flakes")) {
    if (!j.at("flakes").is_array()) bad("'flakes' must be an array");
    for (std::size_t i = 0; i < j.at("flakes").size(); ++i)
      s.flakes.push_back(flake_from_json(j.at("flakes")[i], "flakes[" + std::to_string(i) + "]"));
  }
  if (j.contains("light")) {
    if (!j.at("light").is_array()) bad("'light' must be an array");
    for (std::size_t i = 0; i < j.at("light").size(); ++i)
      s.lights.push_back(region_from_json(j.at("light")[i], "light[" + std::to_string(i) + "]"));
  }
  if (j.contains("interventions")) {
    if (!j.at("interventions").is_array()) bad("'interventions' must be an array");
    for (const auto& iv : j.at("interventions")) s.interventions.push_back(intervention_from_json(iv));
    std::stable_sort(s.interventions.begin(), s.interventions.end(),
                     [](const Intervention& a, const Intervention& b) { return a.tick < b.tick; });
  }
  s.validate();
  return s;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) bad("cannot read scenario '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  json j;
  try {
    j = json::parse(buf.str());
  } catch (const json::parse_error& e) {
    bad(path + ": " + e.what());
  }
  return scenario_from_json(j);
}

}  // namespace kum::sim

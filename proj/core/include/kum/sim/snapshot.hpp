#pragma once

#include <iosfwd>

#include <nlohmann/json.hpp>

#include "kum/sim/state.hpp"

namespace kum::sim {

// Chemo values are sent as integers in units of this quantum.
inline constexpr double kChemoQuantum = 1e-3;

// Full state as JSON. Units: positions and sizes in cells, cell_mm in mm,
// dt/period/phase in seconds, flow_speed in mm/s. Collections are sorted by id.
//
//   {tick, status, command, active, width, height, cell_mm, dt, chemo_quantum,
//    chemo: [q, ...] row-major, lights: [{x0,y0,x1,y1,intensity}],
//    flakes: [{id,x,y,color,mass,label,node}], nodes: [{id,kind,flake,x,y,label}],
//    veins: [{id,a,b,cells:[[x,y],...],flow_speed,period,phase,sign,flips}],
//    tips: [{id,x,y,heading,origin}]}
nlohmann::json snapshot(const SimState& state);

// Delta turning `before` into `after`: scalar fields, changed chemo cells as
// [[index, q], ...], lights when changed, and per collection {upsert, remove}.
nlohmann::json diff_snapshots(const nlohmann::json& before, const nlohmann::json& after);
void apply_delta(nlohmann::json& snap, const nlohmann::json& delta);

// Raster of the chemo field with light, veins, tips and flakes overlaid.
void render_ppm(const nlohmann::json& snap, std::ostream& out, int scale = 2);
// Vector drawing of the sim graph over the flakes.
void render_svg(const nlohmann::json& snap, std::ostream& out);

}  // namespace kum::sim

#include "kum/sim/sim.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstdio>
#include <numbers>

#include <nlohmann/json.hpp>

#include "kum/core/error.hpp"

namespace kum::sim {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kLogEps = 1e-30;

Vec2 center(CellPos c) { return {c.x + 0.5, c.y + 0.5}; }

double dist(Vec2 a, Vec2 b) { return std::hypot(a.x - b.x, a.y - b.y); }

// Signed difference a - b folded into (-pi, pi].
double angle_diff(double a, double b) {
  double d = std::remainder(a - b, 2 * kPi);
  if (d <= -kPi) d += 2 * kPi;
  return d;
}

double deg(double d) { return d * kPi / 180.0; }

CellPos cell_of(const SimState& st, Vec2 p) {
  return {std::clamp(static_cast<int>(std::floor(p.x)), 0, st.width - 1),
          std::clamp(static_cast<int>(std::floor(p.y)), 0, st.height - 1)};
}

Vec2 clamp_inside(const SimState& st, Vec2 p) {
  return {std::clamp(p.x, 0.5, st.width - 0.5), std::clamp(p.y, 0.5, st.height - 0.5)};
}

const Params& params(const SimState& st) { return st.scenario.params; }

double cells_per_tick(const SimState& st) {
  return params(st).tip_speed_mm_s * st.scenario.dt / st.scenario.cell_mm;
}

NodeRef ref(const SimState& st, std::uint32_t id) { return {NodeId{id}, Label{st.nodes.at(id).label}}; }

Flake* flake_by_id(SimState& st, std::uint32_t id) {
  for (auto& f : st.flakes)
    if (f.id == id) return &f;
  return nullptr;
}

void emit(SimState& st, std::vector<SimEvent>& out, SimEvent e) {
  e.tick = st.tick;
  st.events.push_back(e);
  out.push_back(std::move(e));
}

void recompute_light(SimState& st) {
  std::fill(st.light.begin(), st.light.end(), 0.0);
  for (const auto& r : st.lights)
    for (int y = r.y0; y <= r.y1; ++y)
      for (int x = r.x0; x <= r.x1; ++x) st.light[st.index(x, y)] = std::max(st.light[st.index(x, y)], r.intensity);
}

// --- occupancy -------------------------------------------------------------

template <class F>
void for_disc(const SimState& st, Vec2 c, double r, F&& f) {
  const int x0 = std::max(0, static_cast<int>(std::floor(c.x - r)));
  const int x1 = std::min(st.width - 1, static_cast<int>(std::floor(c.x + r)));
  const int y0 = std::max(0, static_cast<int>(std::floor(c.y - r)));
  const int y1 = std::min(st.height - 1, static_cast<int>(std::floor(c.y + r)));
  for (int y = y0; y <= y1; ++y)
    for (int x = x0; x <= x1; ++x)
      if (dist(center({x, y}), c) <= r) f(st.index(x, y));
}

void register_nodes(SimState& st) {
  for (const auto& [id, n] : st.nodes)
    for_disc(st, n.pos, params(st).node_radius, [&](std::size_t i) {
      if (st.node_at[i] == 0) st.node_at[i] = id;
    });
}

void unregister_node(SimState& st, std::uint32_t id) {
  const SimNode& n = st.nodes.at(id);
  for_disc(st, n.pos, params(st).node_radius, [&](std::size_t i) {
    if (st.node_at[i] == id) st.node_at[i] = 0;
  });
}

void register_vein(SimState& st, const Vein& v) {
  for (CellPos c : v.cells) {
    const auto i = st.index(c);
    if (st.node_at[i] == 0 && st.vein_at[i] == 0) st.vein_at[i] = v.id;
  }
}

void unregister_vein(SimState& st, const Vein& v) {
  for (CellPos c : v.cells) {
    const auto i = st.index(c);
    if (st.vein_at[i] == v.id) st.vein_at[i] = 0;
  }
}

void register_tip(SimState& st, const Tip& t) {
  for (CellPos c : t.path) {
    const auto i = st.index(c);
    if (st.node_at[i] == 0 && st.tip_at[i] == 0) st.tip_at[i] = t.id;
  }
}

void unregister_tip(SimState& st, const Tip& t) {
  for (CellPos c : t.path) {
    const auto i = st.index(c);
    if (st.tip_at[i] == t.id) st.tip_at[i] = 0;
  }
}

// --- graph bookkeeping -----------------------------------------------------

std::uint32_t add_node(SimState& st, NodeKind kind, Vec2 pos, std::string label, std::optional<std::uint32_t> flake) {
  const std::uint32_t id = st.next_node++;
  st.nodes[id] = SimNode{id, kind, flake, pos, std::move(label)};
  for_disc(st, pos, params(st).node_radius, [&](std::size_t i) {
    if (st.node_at[i] == 0) st.node_at[i] = id;
  });
  return id;
}

void remove_node(SimState& st, std::uint32_t id) {
  unregister_node(st, id);
  if (auto fid = st.nodes.at(id).flake)
    if (Flake* f = flake_by_id(st, *fid)) f->node.reset();
  st.nodes.erase(id);
  register_nodes(st);
}

bool has_vein(const SimState& st, std::uint32_t a, std::uint32_t b) {
  for (const auto& [id, v] : st.veins)
    if ((v.a == a && v.b == b) || (v.a == b && v.b == a)) return true;
  return false;
}

std::vector<std::uint32_t> neighbors(const SimState& st, std::uint32_t n) {
  std::vector<std::uint32_t> out;
  for (const auto& [id, v] : st.veins) {
    if (v.a == n) out.push_back(v.b);
    if (v.b == n) out.push_back(v.a);
  }
  std::sort(out.begin(), out.end());
  return out;
}

int degree(const SimState& st, std::uint32_t n) {
  int d = 0;
  for (const auto& [id, v] : st.veins) d += (v.a == n) + (v.b == n);
  return d;
}

int tips_from(const SimState& st, std::uint32_t n) {
  return static_cast<int>(std::count_if(st.tips.begin(), st.tips.end(), [&](const Tip& t) { return t.origin == n; }));
}

std::uint32_t add_vein(SimState& st, std::vector<SimEvent>& out, std::uint32_t a, std::uint32_t b,
                       std::vector<CellPos> cells, bool announce = true) {
  const Params& p = params(st);
  Vein v;
  v.id = st.next_vein++;
  v.a = a;
  v.b = b;
  v.cells = std::move(cells);
  v.flow_speed = st.vein_rng.uniform(p.flow_speed_min, p.flow_speed_max);
  v.period = st.vein_rng.uniform(p.reversal_min, p.reversal_max);
  v.phase = st.vein_rng.uniform(0.0, v.period);
  v.born = st.tick;
  v.sign = flow_sign(v, 0.0);
  register_vein(st, v);
  if (announce) emit(st, out, SimEvent{0, SimOp::VeinComplete, {ref(st, a), ref(st, b)}, v.id, {}});
  const auto id = v.id;
  st.veins.emplace(id, std::move(v));
  return id;
}

void remove_vein(SimState& st, std::vector<SimEvent>& out, std::uint32_t vid) {
  const Vein& v = st.veins.at(vid);
  unregister_vein(st, v);
  emit(st, out, SimEvent{0, SimOp::VeinRetract, {ref(st, v.a), ref(st, v.b)}, v.id, {}});
  st.veins.erase(vid);
}

std::string format_pos(Vec2 p) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f,%.2f", p.x, p.y);
  return buf;
}

std::uint32_t branch_node(SimState& st, std::vector<SimEvent>& out, Vec2 pos) {
  const std::uint32_t p = add_node(st, NodeKind::Dynamic, pos, std::string(kDynamicLabel), std::nullopt);
  emit(st, out, SimEvent{0, SimOp::Branch, {ref(st, p)}, 0, format_pos(pos)});
  return p;
}

void move_active(SimState& st, std::vector<SimEvent>& out, std::uint32_t to) {
  if (to == st.active) return;
  emit(st, out, SimEvent{0, SimOp::ActiveMoved, {ref(st, st.active), ref(st, to)}, 0, {}});
  st.active = to;
  for (auto& t : st.tips) t.aim.reset();
}

// Splits vein `vid` at cell index `at` with a new dynamic node; returns it.
std::uint32_t split_vein(SimState& st, std::vector<SimEvent>& out, std::uint32_t vid, std::size_t at) {
  const Vein old = st.veins.at(vid);
  remove_vein(st, out, vid);
  const std::uint32_t p = branch_node(st, out, center(old.cells[at]));
  add_vein(st, out, old.a, p, {old.cells.begin(), old.cells.begin() + static_cast<std::ptrdiff_t>(at) + 1});
  add_vein(st, out, p, old.b, {old.cells.begin() + static_cast<std::ptrdiff_t>(at), old.cells.end()});
  return p;
}

// Splits a live tip's path at index `at`: the prefix becomes a vein from the
// tip's origin to a new dynamic node, which becomes the tip's origin.
std::uint32_t split_tip(SimState& st, std::vector<SimEvent>& out, Tip& t, std::size_t at) {
  unregister_tip(st, t);
  const std::uint32_t p = branch_node(st, out, center(t.path[at]));
  add_vein(st, out, t.origin, p, {t.path.begin(), t.path.begin() + static_cast<std::ptrdiff_t>(at) + 1});
  t.origin = p;
  t.path.erase(t.path.begin(), t.path.begin() + static_cast<std::ptrdiff_t>(at));
  t.travelled = 0;
  register_tip(st, t);
  return p;
}

Tip& new_tip(SimState& st, std::uint32_t origin, Vec2 pos, double heading) {
  Tip t;
  t.id = st.next_tip++;
  t.pos = pos;
  t.heading = heading;
  t.origin = origin;
  t.path.push_back(cell_of(st, pos));
  register_tip(st, t);
  st.tips.push_back(std::move(t));
  return st.tips.back();
}

Tip* tip_by_id(SimState& st, std::uint32_t id) {
  auto it = std::lower_bound(st.tips.begin(), st.tips.end(), id, [](const Tip& t, std::uint32_t v) { return t.id < v; });
  return it != st.tips.end() && it->id == id ? &*it : nullptr;
}

void kill_tip(SimState& st, std::uint32_t id) {
  auto it = std::find_if(st.tips.begin(), st.tips.end(), [&](const Tip& t) { return t.id == id; });
  if (it == st.tips.end()) return;
  unregister_tip(st, *it);
  st.tips.erase(it);
}

// --- tips ------------------------------------------------------------------

std::optional<std::uint32_t> flake_near(const SimState& st, Vec2 p, bool available_only) {
  std::optional<std::uint32_t> best;
  double best_d = 0;
  for (const auto& f : st.flakes) {
    if (available_only && (f.exhausted() || f.occupied())) continue;
    const double d = dist(center(f.pos), p);
    if (d <= params(st).flake_radius && (!best || d < best_d)) {
      best = f.id;
      best_d = d;
    }
  }
  return best;
}

// Cells entered when moving from the last path cell to `to`, 4-connected.
std::vector<CellPos> walk(CellPos from, CellPos to) {
  std::vector<CellPos> cells;
  CellPos c = from;
  while (!(c == to)) {
    if (c.x != to.x)
      c.x += to.x > c.x ? 1 : -1;
    else
      c.y += to.y > c.y ? 1 : -1;
    cells.push_back(c);
  }
  return cells;
}

Vec2 advance(const SimState& st, Vec2 pos, double& heading) {
  const double v = cells_per_tick(st);
  Vec2 next{pos.x + v * std::cos(heading), pos.y + v * std::sin(heading)};
  if (next.x < 0.5 || next.x > st.width - 0.5) heading = kPi - heading;
  if (next.y < 0.5 || next.y > st.height - 0.5) heading = -heading;
  heading = angle_diff(heading, 0.0);
  return clamp_inside(st, next);
}

void occupy(SimState& st, std::vector<SimEvent>& out, Tip& t, std::uint32_t flake_id) {
  Flake& f = *flake_by_id(st, flake_id);
  const std::uint32_t origin = t.origin;
  std::vector<CellPos> cells = t.path;
  if (!(cells.back() == f.pos)) {
    auto rest = walk(cells.back(), f.pos);
    cells.insert(cells.end(), rest.begin(), rest.end());
  }
  kill_tip(st, t.id);
  const std::uint32_t n = add_node(st, NodeKind::Stationary, center(f.pos), f.label, f.id);
  f.node = n;
  emit(st, out, SimEvent{0, SimOp::Occupy, {ref(st, n), ref(st, origin)}, f.id, {}});
  // OCCUPY already stands for the edge.
  add_vein(st, out, origin, n, std::move(cells), false);
  move_active(st, out, n);
}

// Resolves a contact at `cell` for tip `t`. Returns true when the tip ended.
bool contact(SimState& st, std::vector<SimEvent>& out, std::uint32_t tip_id, CellPos cell) {
  Tip* t = tip_by_id(st, tip_id);
  const auto i = st.index(cell);
  const std::uint32_t origin = t->origin;
  if (const std::uint32_t n = st.node_at[i]; n != 0) {
    if (n == origin) return false;
    std::vector<CellPos> cells = t->path;
    kill_tip(st, tip_id);
    if (strands(st, n) < 3 && !has_vein(st, origin, n)) add_vein(st, out, origin, n, std::move(cells));
    return true;
  }
  if (const std::uint32_t vid = st.vein_at[i]; vid != 0) {
    const Vein& v = st.veins.at(vid);
    std::vector<CellPos> cells = t->path;
    kill_tip(st, tip_id);
    if (v.a == origin || v.b == origin) return true;
    const auto at = static_cast<std::size_t>(std::find(v.cells.begin(), v.cells.end(), cell) - v.cells.begin());
    if (at == 0 || at + 1 >= v.cells.size()) return true;
    const std::uint32_t p = split_vein(st, out, vid, at);
    add_vein(st, out, origin, p, std::move(cells));
    return true;
  }
  if (const std::uint32_t other = st.tip_at[i]; other != 0 && other != tip_id) {
    Tip* o = tip_by_id(st, other);
    std::vector<CellPos> cells = t->path;
    if (!o || o->origin == origin) {
      kill_tip(st, tip_id);
      return true;
    }
    const auto at = static_cast<std::size_t>(std::find(o->path.begin(), o->path.end(), cell) - o->path.begin());
    kill_tip(st, tip_id);
    o = tip_by_id(st, other);
    if (at == 0 || at >= o->path.size()) return true;
    if (at + 1 == o->path.size()) {
      // Head-on contact with the other tip's current cell; treat as absorbed.
      return true;
    }
    const std::uint32_t p = split_tip(st, out, *o, at);
    add_vein(st, out, origin, p, std::move(cells));
    return true;
  }
  return false;
}

void branch(SimState& st, std::vector<SimEvent>& out, std::uint32_t tip_id, double first, double second) {
  Tip* t = tip_by_id(st, tip_id);
  unregister_tip(st, *t);
  const Vec2 pos = t->pos;
  const std::uint32_t p = branch_node(st, out, pos);
  t = tip_by_id(st, tip_id);
  add_vein(st, out, t->origin, p, t->path);
  t->origin = p;
  t->path.assign(1, cell_of(st, pos));
  t->travelled = 0;
  t->heading = first;
  register_tip(st, *t);
  new_tip(st, p, pos, second);
}

void execute(SimState& st, std::vector<SimEvent>& out, std::uint32_t tip_id, const TipCommand& cmd) {
  Tip* t = tip_by_id(st, tip_id);
  if (std::holds_alternative<Retract>(cmd)) {
    kill_tip(st, tip_id);
    return;
  }
  if (const auto* b = std::get_if<Branch>(&cmd)) {
    branch(st, out, tip_id, b->first, b->second);
    return;
  }
  if (const auto* p = std::get_if<Propagate>(&cmd)) t->heading = p->heading;
  double heading = t->heading;
  const Vec2 next = advance(st, t->pos, heading);
  t->heading = heading;
  t->travelled += dist(t->pos, next);
  t->pos = next;
  for (CellPos c : walk(t->path.back(), cell_of(st, next))) {
    t = tip_by_id(st, tip_id);
    t->path.push_back(c);
    const auto i = st.index(c);
    if (st.node_at[i] == 0 && st.tip_at[i] == 0) st.tip_at[i] = tip_id;
    if (const auto* o = std::get_if<Occupy>(&cmd)) {
      if (dist(center(c), center(flake_by_id(st, o->flake)->pos)) <= params(st).flake_radius) {
        occupy(st, out, *t, o->flake);
        return;
      }
    }
    if (contact(st, out, tip_id, c)) return;
  }
  if (const auto* o = std::get_if<Occupy>(&cmd)) occupy(st, out, *tip_by_id(st, tip_id), o->flake);
}

// --- tip formation at the active node -------------------------------------

double bearing(Vec2 from, Vec2 to) { return std::atan2(to.y - from.y, to.x - from.x); }

// Direction in which a vein leaves node `n`, measured a few cells out.
double vein_bearing(const SimState& st, const Vein& v, std::uint32_t n) {
  const Vec2 origin = st.nodes.at(n).pos;
  const double reach = params(st).formation_radius;
  const auto pick = [&](auto begin, auto end) {
    CellPos last = *begin;
    for (auto it = begin; it != end; ++it) {
      last = *it;
      if (dist(center(*it), origin) >= reach) break;
    }
    return bearing(origin, center(last));
  };
  return v.a == n ? pick(v.cells.begin(), v.cells.end()) : pick(v.cells.rbegin(), v.cells.rend());
}

bool claimed(const SimState& st, double theta) {
  const Vec2 a = st.nodes.at(st.active).pos;
  const double cone = deg(params(st).claim_cone_deg);
  for (const auto& t : st.tips) {
    if (t.aim && std::abs(angle_diff(*t.aim, theta)) < cone) return true;
    if (dist(t.pos, a) > 0.5 && std::abs(angle_diff(bearing(a, t.pos), theta)) < cone) return true;
  }
  for (const auto& [id, v] : st.veins)
    if ((v.a == st.active || v.b == st.active) && std::abs(angle_diff(vein_bearing(st, v, st.active), theta)) < cone)
      return true;
  return false;
}

// Launches a tip from the active node toward `theta`. When its strand budget
// is spent, the strand cell nearest to the node (outside every node body) is
// split and the tip grows from the split point instead.
void launch(SimState& st, std::vector<SimEvent>& out, double theta) {
  const std::uint32_t a = st.active;
  const Vec2 apos = st.nodes.at(a).pos;
  if (static_cast<int>(st.tips.size()) >= params(st).tip_cap) return;
  if (strands(st, a) < 3) {
    new_tip(st, a, apos, theta).aim = theta;
    return;
  }
  struct Site {
    double d;
    bool vein;
    std::uint32_t id;
    std::size_t at;
  };
  std::optional<Site> best;
  const auto consider = [&](const std::vector<CellPos>& cells, bool vein, std::uint32_t id) {
    for (std::size_t i = 1; i + 1 < cells.size(); ++i) {
      if (st.node_at[st.index(cells[i])] != 0) continue;
      const double d = dist(center(cells[i]), apos);
      if (!best || d < best->d) best = Site{d, vein, id, i};
    }
  };
  for (const auto& t : st.tips) consider(t.path, false, t.id);
  for (const auto& [id, v] : st.veins) consider(v.cells, true, id);
  if (!best) return;
  const std::uint32_t p =
      best->vein ? split_vein(st, out, best->id, best->at) : split_tip(st, out, *tip_by_id(st, best->id), best->at);
  new_tip(st, p, st.nodes.at(p).pos, theta).aim = theta;
}

void form_tips(SimState& st, std::vector<SimEvent>& out) {
  const Params& p = params(st);
  const int K = p.ring_directions;
  const Vec2 a = st.nodes.at(st.active).pos;
  const auto ring = [&](double r) {
    std::vector<double> v(static_cast<std::size_t>(K));
    for (int j = 0; j < K; ++j)
      v[static_cast<std::size_t>(j)] = sample(
          st.chemo, st.width, st.height,
          clamp_inside(st, {a.x + r * std::cos(2 * kPi * j / K), a.y + r * std::sin(2 * kPi * j / K)}));
    return v;
  };
  st.idle = st.tips.empty() ? st.idle + 1 : 0;
  // Nothing left to forage for: the residual field would only seed aimless tips.
  if (std::none_of(st.flakes.begin(), st.flakes.end(), [](const Flake& f) { return !f.exhausted() && !f.occupied(); }))
    return;
  const double threshold = st.idle >= static_cast<std::uint64_t>(p.formation_patience) ? 0.0 : p.formation_threshold;
  const auto inner = ring(p.formation_radius);
  const auto outer = ring(p.formation_outer);
  // A direction qualifies when the signal keeps rising away from the node and
  // peaks there on the outer ring.
  std::vector<std::pair<double, int>> peaks;
  for (int j = 0; j < K; ++j) {
    const auto at = [&](int k) { return outer[static_cast<std::size_t>((k + K) % K)]; };
    const double c = at(j);
    if (c > at(j - 1) && c >= at(j + 1) && c >= threshold &&
        c >= inner[static_cast<std::size_t>(j)] * (1.0 + p.formation_rise))
      peaks.emplace_back(-c, j);
  }
  std::sort(peaks.begin(), peaks.end());
  for (const auto& [neg, j] : peaks) {
    const double theta = angle_diff(2 * kPi * j / K, 0.0);
    if (claimed(st, theta)) continue;
    launch(st, out, theta);
  }
}

// --- per-tick phases -------------------------------------------------------

void apply_now(SimState& st, std::vector<SimEvent>& out, const Intervention& iv) {
  const Params& p = params(st);
  std::visit(
      [&](const auto& w) {
        using T = std::decay_t<decltype(w)>;
        if constexpr (std::is_same_v<T, PlaceFlake>) {
          const FlakeSpec& spec = w.flake;
          if (!in_bounds(st.scenario, spec.pos)) throw Error(ErrorCode::ConfigError, "flake out of bounds");
          const double mass = spec.mass.value_or(p.flake_mass);
          if (auto existing = flake_near(st, center(spec.pos), false)) {
            flake_by_id(st, *existing)->mass = mass;
          } else {
            Flake f;
            f.id = st.next_flake++;
            f.pos = spec.pos;
            f.color = spec.color;
            f.mass = mass;
            f.label = st.scenario.label_for(spec);
            st.flakes.push_back(std::move(f));
          }
        } else if constexpr (std::is_same_v<T, PlaceLight>) {
          const auto& r = w.region;
          if (!in_bounds(st.scenario, {r.x0, r.y0}) || !in_bounds(st.scenario, {r.x1, r.y1}) || r.x0 > r.x1 ||
              r.y0 > r.y1)
            throw Error(ErrorCode::ConfigError, "light region out of bounds");
          if (!(r.intensity >= 0 && r.intensity <= 1))
            throw Error(ErrorCode::ConfigError, "light intensity must lie in [0, 1]");
          st.lights.push_back(r);
          recompute_light(st);
        } else {
          st.lights.clear();
          recompute_light(st);
        }
      },
      iv.what);
  nlohmann::json j = iv;
  j.erase("tick");
  emit(st, out, SimEvent{0, SimOp::Intervene, {}, 0, j.dump()});
}

void apply_due(SimState& st, std::vector<SimEvent>& out) {
  auto& list = st.scenario.interventions;
  while (st.applied_interventions < list.size() && list[st.applied_interventions].tick <= st.tick) {
    apply_now(st, out, list[st.applied_interventions]);
    ++st.applied_interventions;
  }
}

void update_veins(SimState& st) {
  for (auto& [id, v] : st.veins) {
    const double t = static_cast<double>(st.tick + 1 - v.born) * st.scenario.dt;
    const int s = flow_sign(v, t);
    if (s != v.sign) {
      ++v.flips;
      v.sign = s;
    }
  }
}

void deplete(SimState& st) {
  const double loss = params(st).depletion_rate * st.scenario.dt;
  for (auto& f : st.flakes)
    if (f.occupied() && f.mass > 0) f.mass = std::max(0.0, f.mass - loss);
}

bool exhausted_node(const SimState& st, const SimNode& n) {
  if (n.kind == NodeKind::Dynamic) return true;
  for (const auto& f : st.flakes)
    if (f.id == *n.flake) return f.exhausted();
  return true;
}

void extract_events(SimState& st, std::vector<SimEvent>& out) {
  const SimNode& a = st.nodes.at(st.active);
  if (a.kind == NodeKind::Stationary && exhausted_node(st, a)) {
    const auto nb = neighbors(st, st.active);
    if (!nb.empty()) {
      // Leaving a spent node: its pseudopodia are withdrawn with it.
      std::vector<std::uint32_t> own;
      for (const auto& t : st.tips)
        if (t.origin == st.active) own.push_back(t.id);
      for (auto id : own) kill_tip(st, id);
      move_active(st, out, nb.front());
    }
  }
  std::vector<std::uint32_t> doomed;
  for (const auto& [id, n] : st.nodes)
    if (id != st.active && exhausted_node(st, n) && degree(st, id) <= 1 && tips_from(st, id) == 0) doomed.push_back(id);
  for (std::uint32_t id : doomed) {
    for (auto it = st.veins.begin(); it != st.veins.end();) {
      const auto vid = it->first;
      const bool incident = it->second.a == id || it->second.b == id;
      ++it;
      if (incident) remove_vein(st, out, vid);
    }
    emit(st, out, SimEvent{0, SimOp::NodeAbandoned, {ref(st, id)}, 0, {}});
    remove_node(st, id);
  }
}

}  // namespace

std::string_view to_string(HighCommand c) noexcept {
  switch (c) {
    case HighCommand::SearchForNutrients: return "SearchForNutrients";
    case HighCommand::EscapeLight: return "EscapeLight";
    case HighCommand::FormSclerotium: return "FormSclerotium";
    case HighCommand::Fructify: return "Fructify";
  }
  return "?";
}

std::string_view to_string(HaltStatus s) noexcept {
  switch (s) {
    case HaltStatus::Running: return "Running";
    case HaltStatus::Sclerotium: return "Sclerotium";
    case HaltStatus::Fructify: return "Fructify";
  }
  return "?";
}

std::string_view to_string(SimOp op) noexcept {
  switch (op) {
    case SimOp::Occupy: return "OCCUPY";
    case SimOp::Branch: return "BRANCH";
    case SimOp::VeinComplete: return "VEIN_COMPLETE";
    case SimOp::VeinRetract: return "VEIN_RETRACT";
    case SimOp::NodeAbandoned: return "NODE_ABANDONED";
    case SimOp::ActiveMoved: return "ACTIVE_MOVED";
    case SimOp::Halt: return "HALT";
    case SimOp::Intervene: return "INTERVENE";
  }
  return "?";
}

SimState init_scenario(const Scenario& scenario) {
  scenario.validate();
  SimState st;
  st.scenario = scenario;
  st.width = scenario.width;
  st.height = scenario.height;
  const auto cells = static_cast<std::size_t>(st.width) * static_cast<std::size_t>(st.height);
  st.chemo.assign(cells, 0.0);
  st.light.assign(cells, 0.0);
  st.node_at.assign(cells, 0);
  st.vein_at.assign(cells, 0);
  st.tip_at.assign(cells, 0);
  st.lights = scenario.lights;
  recompute_light(st);
  for (const auto& spec : scenario.flakes) {
    Flake f;
    f.id = st.next_flake++;
    f.pos = spec.pos;
    f.color = spec.color;
    f.mass = spec.mass.value_or(scenario.params.flake_mass);
    f.label = scenario.label_for(spec);
    st.flakes.push_back(std::move(f));
  }
  st.tip_rng = Stream(stream_key(scenario.seed, "tips"), 0);
  st.vein_rng = Stream(stream_key(scenario.seed, "veins"), 0);

  if (auto f = flake_near(st, center(scenario.start), true)) {
    Flake& fl = *flake_by_id(st, *f);
    st.active = add_node(st, NodeKind::Stationary, center(fl.pos), fl.label, fl.id);
    fl.node = st.active;
  } else {
    st.active = add_node(st, NodeKind::Dynamic, center(scenario.start), scenario.start_label, std::nullopt);
  }
  st.start_node = ref(st, st.active);
  return st;
}

TipCommand tip_step(Tip& tip, SimState& st) {
  const Params& p = params(st);
  const double here = sample(st.chemo, st.width, st.height, tip.pos);
  if (here < p.retract_floor) {
    if (++tip.low_ticks >= p.retract_ticks) return Retract{};
  } else {
    tip.low_ticks = 0;
  }
  const bool escaping = st.command == HighCommand::EscapeLight;
  const double w_light = escaping ? p.w_light_escape : p.w_light;
  const int K = p.directions;
  const double log_here = std::log(here + kLogEps);

  struct Candidate {
    double theta;
    double gradient;
    double score;
  };
  std::vector<Candidate> cands;
  for (int k = 0; k < K; ++k) {
    const double theta = angle_diff(2 * kPi * k / K, 0.0);
    const double delta = angle_diff(theta, tip.heading);
    if (std::abs(delta) > kPi / 2 + 1e-9) continue;
    const Vec2 s = clamp_inside(st, {tip.pos.x + p.sensor_distance * std::cos(theta),
                                     tip.pos.y + p.sensor_distance * std::sin(theta)});
    const double g = std::log(sample(st.chemo, st.width, st.height, s) + kLogEps) - log_here;
    double score = p.w_gradient * g + p.w_persistence * std::cos(delta) - w_light * light_at(st, s);
    if (p.w_noise > 0) score += p.w_noise * st.tip_rng.normal();
    cands.push_back({theta, g, score});
  }
  // Candidates sorted by angle relative to the heading, for the mode search.
  std::sort(cands.begin(), cands.end(), [&](const Candidate& a, const Candidate& b) {
    return angle_diff(a.theta, tip.heading) < angle_diff(b.theta, tip.heading);
  });

  if (!escaping && tip.travelled >= p.branch_min_travel && static_cast<int>(st.tips.size()) < p.tip_cap) {
    std::vector<std::size_t> modes;
    for (std::size_t i = 0; i < cands.size(); ++i) {
      const double g = cands[i].gradient;
      const bool left = i == 0 || g > cands[i - 1].gradient;
      const bool right = i + 1 == cands.size() || g >= cands[i + 1].gradient;
      if (left && right && g > 0) modes.push_back(i);
    }
    if (modes.size() >= 2) {
      std::sort(modes.begin(), modes.end(),
                [&](std::size_t a, std::size_t b) { return cands[a].gradient > cands[b].gradient; });
      const Candidate& m1 = cands[modes[0]];
      const Candidate& m2 = cands[modes[1]];
      const auto c = cell_of(st, tip.pos);
      if (m2.gradient / m1.gradient >= p.branch_ratio &&
          std::abs(angle_diff(m1.theta, m2.theta)) >= deg(p.branch_separation_deg) - 1e-9 &&
          st.node_at[st.index(c)] == 0 && st.vein_at[st.index(c)] == 0)
        return Branch{m1.theta, m2.theta};
    }
  }

  const auto best = std::max_element(cands.begin(), cands.end(),
                                     [](const Candidate& a, const Candidate& b) { return a.score < b.score; });
  double heading = best->theta;
  const Vec2 next = advance(st, tip.pos, heading);
  if (auto f = flake_near(st, next, true)) return Occupy{*f};
  return Propagate{best->theta};
}

int strands(const SimState& st, std::uint32_t node) { return degree(st, node) + tips_from(st, node); }

std::vector<SimEvent> sim_step(SimState& st) {
  if (!st.running()) throw Error(ErrorCode::HaltedError, "simulation has halted");
  std::vector<SimEvent> out;
  apply_due(st, out);

  std::vector<std::size_t> sinks;
  for (const auto& [id, n] : st.nodes)
    for_disc(st, n.pos, params(st).node_radius, [&](std::size_t i) { sinks.push_back(i); });
  std::sort(sinks.begin(), sinks.end());
  sinks.erase(std::unique(sinks.begin(), sinks.end()), sinks.end());
  field_step(st.chemo, st.width, st.height, st.flakes, params(st), sinks);

  std::vector<std::uint32_t> ids;
  for (const auto& t : st.tips) ids.push_back(t.id);
  for (std::uint32_t id : ids) {
    Tip* t = tip_by_id(st, id);
    if (!t) continue;
    const TipCommand cmd = tip_step(*t, st);
    execute(st, out, id, cmd);
  }
  if (st.command == HighCommand::SearchForNutrients) form_tips(st, out);

  update_veins(st);
  deplete(st);
  extract_events(st, out);

  const HaltStatus h = halt_status(st);
  if (h != HaltStatus::Running) {
    st.status = h;
    st.command = h == HaltStatus::Sclerotium ? HighCommand::FormSclerotium : HighCommand::Fructify;
    for (const auto& t : st.tips) unregister_tip(st, t);
    st.tips.clear();
    emit(st, out, SimEvent{0, SimOp::Halt, {}, 0, std::string(to_string(h))});
  } else {
    st.command = light_at(st, st.nodes.at(st.active).pos) >= params(st).escape_light ? HighCommand::EscapeLight
                                                                                       : HighCommand::SearchForNutrients;
  }
  assert(st.nodes.contains(st.active));
  ++st.tick;
  return out;
}

void run_until(SimState& st, std::uint64_t max_ticks) {
  while (st.running() && st.tick < max_ticks) sim_step(st);
}

int flow_sign(const Vein& vein, double t) noexcept {
  const auto k = static_cast<long long>(std::floor((t + vein.phase) / vein.period));
  return k % 2 == 0 ? 1 : -1;
}

double ambient_light(const SimState& st) noexcept {
  if (st.light.empty()) return 0;
  double sum = 0;
  for (double l : st.light) sum += l;
  return sum / static_cast<double>(st.light.size());
}

double light_at(const SimState& st, Vec2 p) noexcept { return st.light[st.index(cell_of(st, p))]; }

HaltStatus halt_status(const SimState& st) noexcept {
  if (st.status != HaltStatus::Running) return st.status;
  for (const auto& f : st.flakes)
    if (!f.exhausted()) return HaltStatus::Running;
  return ambient_light(st) < params(st).fructify_light ? HaltStatus::Sclerotium : HaltStatus::Fructify;
}

void apply_scheduled(SimState& st) {
  if (!st.running()) return;
  std::vector<SimEvent> out;
  apply_due(st, out);
}

void apply_intervention(SimState& st, const InterventionKind& what) {
  if (!st.running()) throw Error(ErrorCode::HaltedError, "cannot intervene after the simulation halted");
  std::vector<SimEvent> out;
  apply_due(st, out);
  Intervention iv{st.tick, what};
  apply_now(st, out, iv);
  auto& list = st.scenario.interventions;
  list.insert(list.begin() + static_cast<std::ptrdiff_t>(st.applied_interventions), iv);
  ++st.applied_interventions;
}

ExtractedGraph extract_graph(const SimState& st) {
  if (st.nodes.empty()) throw Error(ErrorCode::EmptyPlasmodium, "no plasmodium nodes");
  ExtractedGraph out;
  out.graph.set_name(st.scenario.name);
  for (const auto& [id, n] : st.nodes) {
    out.graph.add_node(NodeId{id}, Label{n.label});
    out.meta[NodeId{id}] = NodeMeta{n.kind, n.flake, n.pos};
  }
  for (const auto& [id, v] : st.veins) out.graph.add_edge(NodeId{v.a}, NodeId{v.b});
  out.graph.set_active(NodeId{st.active});
  return out;
}

DegreeStats degree_stats(const StorageGraph& g) {
  DegreeStats s;
  s.nodes = g.node_count();
  s.edges = g.edge_count();
  for (NodeId n : g.node_ids()) {
    const std::size_t d = g.degree(n);
    s.max = std::max(s.max, d);
    ++s.histogram[d];
  }
  s.average = s.nodes ? 2.0 * static_cast<double>(s.edges) / static_cast<double>(s.nodes) : 0.0;
  return s;
}

std::vector<PrimOp> event_ops(const SimEvent& e) {
  switch (e.op) {
    case SimOp::Occupy:
      return {PrimOp{OpKind::AddNode, {e.nodes.at(0)}, {}}, PrimOp{OpKind::AddEdge, {e.nodes.at(1), e.nodes.at(0)}, {}}};
    case SimOp::Branch: return {PrimOp{OpKind::AddNode, {e.nodes.at(0)}, {}}};
    case SimOp::VeinComplete: return {PrimOp{OpKind::AddEdge, e.nodes, {}}};
    case SimOp::VeinRetract: return {PrimOp{OpKind::RemoveEdge, e.nodes, {}}};
    case SimOp::NodeAbandoned: return {PrimOp{OpKind::RemoveNode, e.nodes, {}}};
    case SimOp::ActiveMoved: return {PrimOp{OpKind::MoveActive, {e.nodes.at(1)}, {}}};
    case SimOp::Halt: return {PrimOp{OpKind::Halt, {}, {}}};
    case SimOp::Intervene: return {};
  }
  return {};
}

StorageGraph initial_graph(const SimState& st) {
  StorageGraph g(st.scenario.name);
  g.add_node(st.start_node.id, st.start_node.label);
  g.set_active(st.start_node.id);
  return g;
}

}  // namespace kum::sim

#include "kum/real/realization.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numbers>
#include <ostream>
#include <set>

#include "kum/core/canonical.hpp"
#include "kum/core/error.hpp"
#include "kum/sim/sim.hpp"

namespace kum::real {

using sim::Color;

namespace {

bool is_dynamic(const StorageGraph& g, NodeId n) { return g.label(n).name == sim::kDynamicLabel; }

// Binding attempt for one expected/emergent op pair; commits on success.
bool try_match(const PrimOp& want, const PrimOp& got, std::map<NodeId, NodeId>& fwd, std::map<NodeId, NodeId>& back) {
  if (want.kind != got.kind || want.operands.size() != got.operands.size()) return false;
  if ((want.kind == OpKind::Relabel || want.kind == OpKind::Output) && want.text != got.text) return false;
  const auto fits = [&](const std::vector<NodeRef>& w, const std::vector<NodeRef>& g) {
    auto f = fwd;
    auto b = back;
    for (std::size_t i = 0; i < w.size(); ++i) {
      if (w[i].label != g[i].label) return false;
      auto fi = f.find(w[i].id);
      auto bi = b.find(g[i].id);
      if (fi != f.end() || bi != b.end()) {
        if (fi == f.end() || bi == b.end() || fi->second != g[i].id) return false;
        continue;
      }
      f[w[i].id] = g[i].id;
      b[g[i].id] = w[i].id;
    }
    fwd = std::move(f);
    back = std::move(b);
    return true;
  };
  if (fits(want.operands, got.operands)) return true;
  if (want.kind == OpKind::AddEdge || want.kind == OpKind::RemoveEdge) {
    std::vector<NodeRef> flipped(got.operands.rbegin(), got.operands.rend());
    return fits(want.operands, flipped);
  }
  return false;
}

std::string record_line(const char* tag, std::size_t index, const TraceRecord& r) {
  return std::string(tag) + "=" + std::to_string(index) + " step=" + std::to_string(r.step) + " " + format_op(r.op);
}

}  // namespace

LabelColorMap::LabelColorMap(const std::map<std::string, Color>& entries) {
  if (entries.size() > kMaxStationaryLabels)
    throw Error(ErrorCode::TooManyLabels, std::to_string(entries.size()) + " stationary labels, at most 5 colors");
  for (const auto& [label, color] : entries) {
    if (!to_label_.emplace(color, label).second)
      throw Error(ErrorCode::ConfigError, "labels '" + to_label_.at(color) + "' and '" + label + "' share color " +
                                              std::string(sim::to_string(color)));
    to_color_.emplace(label, color);
  }
}

LabelColorMap LabelColorMap::automatic(const StorageGraph& g) {
  std::set<std::string> labels;
  for (NodeId n : g.node_ids()) labels.insert(g.label(n).name);
  if (labels.size() > kMaxStationaryLabels)
    throw Error(ErrorCode::TooManyLabels, std::to_string(labels.size()) + " stationary labels, at most 5 colors");
  std::map<std::string, Color> m;
  std::size_t i = 0;
  for (const auto& l : labels) m[l] = sim::kAllColors[i++];
  return LabelColorMap(m);
}

Color LabelColorMap::color_of(const std::string& label) const {
  auto it = to_color_.find(label);
  if (it == to_color_.end()) throw Error(ErrorCode::ConfigError, "label '" + label + "' has no color");
  return it->second;
}

std::optional<std::string> LabelColorMap::label_of(Color c) const {
  auto it = to_label_.find(c);
  if (it == to_label_.end()) return std::nullopt;
  return it->second;
}

EventTrace growth_trace(const StorageGraph& g) {
  EventTrace t;
  if (g.empty()) return t;
  const auto ref = [&](NodeId n) { return NodeRef{n, g.label(n)}; };
  const auto push = [&](OpKind k, std::vector<NodeRef> ops) {
    t.push_back(TraceRecord{t.size(), "grow", PrimOp{k, std::move(ops), {}}, std::string(kNoHash)});
  };
  std::set<NodeId> seen{g.active()};
  std::set<Edge> used;
  std::deque<NodeId> queue{g.active()};
  while (!queue.empty()) {
    const NodeId n = queue.front();
    queue.pop_front();
    for (NodeId m : g.neighbors(n)) {
      if (!seen.insert(m).second) continue;
      push(OpKind::AddNode, {ref(m)});
      push(OpKind::AddEdge, {ref(n), ref(m)});
      used.insert(make_edge(n, m));
      queue.push_back(m);
    }
  }
  for (const Edge& e : g.edges())
    if (!used.contains(e) && seen.contains(e.first)) push(OpKind::AddEdge, {ref(e.first), ref(e.second)});
  return t;
}

StorageGraph normalize(const StorageGraph& g) {
  StorageGraph out = g;
  bool changed = true;
  while (changed) {
    changed = false;
    for (NodeId n : out.node_ids()) {
      if (n == out.active() || !is_dynamic(out, n)) continue;
      const auto nb = out.neighbors(n);
      if (nb.size() <= 1) {
        out.remove_node(n);
        changed = true;
      } else if (nb.size() == 2) {
        const NodeId a = *nb.begin();
        const NodeId b = *std::next(nb.begin());
        out.remove_node(n);
        if (!out.has_edge(a, b)) out.add_edge(a, b);
        changed = true;
      }
    }
  }
  return out;
}

std::string normalized_hash(const StorageGraph& g) {
  if (!g.contains(g.active())) return std::string(kNoHash);
  try {
    return canonical_hash(normalize(g));
  } catch (const Error&) {
    return std::string(kNoHash);
  }
}

EventTrace map_events(const std::vector<sim::SimEvent>& events, const StorageGraph* initial) {
  EventTrace t;
  std::optional<StorageGraph> g;
  if (initial) g = *initial;
  for (const auto& e : events)
    for (auto& op : sim::event_ops(e)) {
      TraceRecord r{e.tick, std::string(sim::to_string(e.op)), std::move(op), std::string(kNoHash)};
      if (g) {
        if (r.op.kind != OpKind::Halt) apply_op(*g, r.op);
        r.hash = normalized_hash(*g);
      }
      t.push_back(std::move(r));
    }
  return t;
}

StorageGraph replay_trace(StorageGraph g, const EventTrace& trace) {
  for (const auto& r : trace)
    if (r.op.kind != OpKind::Halt) apply_op(g, r.op);
  return g;
}

ConformanceReport conformance_check(const EventTrace& expected, const EventTrace& emergent, std::size_t window,
                                    std::map<NodeId, NodeId> binding) {
  ConformanceReport r;
  r.window = window;
  std::map<NodeId, NodeId> back;
  for (const auto& [a, b] : binding) back[b] = a;
  std::vector<bool> used(emergent.size(), false);
  std::size_t j = 0;
  for (std::size_t i = 0; i < expected.size(); ++i) {
    bool found = false;
    for (std::size_t k = j; k < emergent.size() && k <= j + window; ++k) {
      if (try_match(expected[i].op, emergent[k].op, binding, back)) {
        r.matched.push_back({i, k});
        used[k] = true;
        j = k + 1;
        found = true;
        break;
      }
    }
    if (!found) r.unmatched.push_back(i);
  }
  for (std::size_t k = 0; k < emergent.size(); ++k)
    if (!used[k]) r.surplus.push_back(k);
  r.binding = std::move(binding);
  r.expected_hash = expected.empty() ? "" : expected.back().hash;
  r.emergent_hash = emergent.empty() ? "" : emergent.back().hash;
  r.isomorphic = r.expected_hash == r.emergent_hash && r.expected_hash != kNoHash;
  return r;
}

void write_report_text(std::ostream& out, const ConformanceReport& r, const EventTrace& expected,
                       const EventTrace& emergent) {
  out << "conformance: " << (r.pass() ? "PASS" : "FAIL") << '\n';
  out << "window: " << r.window << '\n';
  out << "matched: " << r.matched.size() << " of " << expected.size() << " expected ops\n";
  out << "unmatched: " << r.unmatched.size() << '\n';
  for (auto i : r.unmatched) out << "  #" << i << ' ' << format_op(expected[i].op) << '\n';
  out << "surplus: " << r.surplus.size() << " of " << emergent.size() << " emergent ops\n";
  out << "final graphs: " << (r.isomorphic ? "isomorphic" : "different") << " (expected "
      << (r.expected_hash.empty() ? "<empty>" : r.expected_hash) << ", emergent "
      << (r.emergent_hash.empty() ? "<empty>" : r.emergent_hash) << ")\n";
}

void write_report_records(std::ostream& out, const ConformanceReport& r, const EventTrace& expected,
                          const EventTrace& emergent) {
  for (const auto& m : r.matched)
    out << "match expected=" << m.expected << ' ' << record_line("emergent", m.emergent, emergent[m.emergent]) << '\n';
  for (auto i : r.unmatched) out << "unmatched " << record_line("expected", i, expected[i]) << '\n';
  for (auto k : r.surplus) out << "surplus " << record_line("emergent", k, emergent[k]) << '\n';
  out << "final isomorphic=" << (r.isomorphic ? "true" : "false")
      << " expected=" << (r.expected_hash.empty() ? "-" : r.expected_hash)
      << " emergent=" << (r.emergent_hash.empty() ? "-" : r.emergent_hash) << '\n';
  out << "verdict=" << (r.pass() ? "PASS" : "FAIL") << " window=" << r.window << " matched=" << r.matched.size()
      << " unmatched=" << r.unmatched.size() << " surplus=" << r.surplus.size() << '\n';
}

StorageGraph solution_component(const StorageGraph& g, NodeId initial) {
  if (!g.contains(initial)) throw Error(ErrorCode::NodeUnknown, "node " + std::to_string(to_uint(initial)));
  return induced_subgraph(g, component_of(g, initial));
}

CompiledScenario compile_scenario(const StorageGraph& data, const CompileOptions& o) {
  if (data.empty() || !data.contains(data.active())) throw Error(ErrorCode::LayoutError, "graph has no active node");
  CompiledScenario c;
  c.labels = o.labels ? *o.labels : LabelColorMap::automatic(data);
  for (NodeId n : data.node_ids()) c.labels.color_of(data.label(n).name);

  sim::Scenario& s = c.scenario;
  s.name = data.name().empty() ? "realized" : data.name();
  s.width = o.width;
  s.height = o.height;
  s.seed = o.seed;
  for (const auto& [label, color] : c.labels.entries()) s.labels[color] = label;

  const auto ids = data.node_ids();
  if (o.layout) {
    c.layout = *o.layout;
  } else {
    const double r = 0.35 * std::min(o.width, o.height);
    const double cx = o.width / 2.0;
    const double cy = o.height / 2.0;
    for (std::size_t k = 0; k < ids.size(); ++k) {
      const double th = 2 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(ids.size());
      c.layout[ids[k]] = {static_cast<int>(std::floor(cx + r * std::cos(th))),
                          static_cast<int>(std::floor(cy + r * std::sin(th)))};
    }
    if (ids.size() == 1) c.layout[ids[0]] = {o.width / 2, o.height / 2};
  }
  std::set<std::pair<int, int>> cells;
  for (NodeId n : ids) {
    auto it = c.layout.find(n);
    if (it == c.layout.end()) throw Error(ErrorCode::LayoutError, "no position for node " + std::to_string(to_uint(n)));
    if (!sim::in_bounds(s, it->second))
      throw Error(ErrorCode::LayoutError, "node " + std::to_string(to_uint(n)) + " lies outside the arena");
    if (!cells.emplace(it->second.x, it->second.y).second)
      throw Error(ErrorCode::LayoutError, "two nodes share cell (" + std::to_string(it->second.x) + ", " +
                                              std::to_string(it->second.y) + ")");
  }
  s.start = c.layout.at(data.active());
  s.start_label = data.label(data.active()).name;
  if (ids.size() > 1)
    for (NodeId n : ids) {
      sim::FlakeSpec f;
      f.pos = c.layout.at(n);
      f.color = c.labels.color_of(data.label(n).name);
      f.label = data.label(n).name;
      f.mass = o.flake_mass;
      c.flake_of[n] = static_cast<std::uint32_t>(s.flakes.size() + 1);
      s.flakes.push_back(std::move(f));
    }

  c.expected_initial = StorageGraph(s.name);
  c.expected_initial.add_node(data.active(), data.label(data.active()));
  c.expected_initial.set_active(data.active());
  EventTrace expected = growth_trace(data);
  if (o.expected) {
    for (const auto& rec : *o.expected) {
      if (rec.op.kind == OpKind::Relabel) {
        const NodeId n = rec.op.operands.at(0).id;
        if (!c.layout.contains(n))
          throw Error(ErrorCode::LayoutError, "RELABEL of node " + std::to_string(to_uint(n)) + " without a position");
        sim::FlakeSpec f;
        f.pos = c.layout.at(n);
        f.color = c.labels.color_of(rec.op.text);
        f.label = rec.op.text;
        f.mass = o.flake_mass;
        s.interventions.push_back({(rec.step + 1) * o.ticks_per_step, sim::PlaceFlake{f}});
      }
      expected.push_back(rec);
    }
  }
  StorageGraph g = c.expected_initial;
  for (std::size_t i = 0; i < expected.size(); ++i) {
    expected[i].step = i;
    if (expected[i].op.kind != OpKind::Halt) apply_op(g, expected[i].op);
    expected[i].hash = normalized_hash(g);
  }
  c.expected = std::move(expected);
  s.validate();
  return c;
}

Realization realize(const CompiledScenario& c, std::uint64_t max_ticks, std::size_t window) {
  sim::SimState st = sim::init_scenario(c.scenario);
  const auto available = [&] {
    return std::any_of(st.flakes.begin(), st.flakes.end(),
                       [](const sim::Flake& f) { return !f.exhausted() && !f.occupied(); });
  };
  const auto pending = [&] { return st.applied_interventions < st.scenario.interventions.size(); };
  while (st.running() && st.tick < max_ticks && (available() || pending())) sim::sim_step(st);

  Realization out;
  const StorageGraph start = sim::initial_graph(st);
  out.emergent = map_events(st.events, &start);
  out.log = sim::make_log(st);
  out.final_graph = sim::extract_graph(st).graph;
  std::map<NodeId, NodeId> binding{{c.expected_initial.active(), start.active()}};
  const EventTrace expected = c.expected.value_or(EventTrace{});
  out.report = conformance_check(expected, out.emergent, window, binding);
  // A data graph fixes no resting place for the active node, and active moves
  // are already checked op by op: compare final structures rooted at the
  // emergent image of the expected active node.
  try {
    const StorageGraph want = replay_trace(c.expected_initial, expected);
    StorageGraph got = replay_trace(start, out.emergent);
    const auto it = out.report.binding.find(want.active());
    if (it != out.report.binding.end() && got.contains(it->second)) got.set_active(it->second);
    out.report.expected_hash = normalized_hash(want);
    out.report.emergent_hash = normalized_hash(got);
  } catch (const Error&) {
    out.report.expected_hash = std::string(kNoHash);
  }
  out.report.isomorphic = out.report.expected_hash != kNoHash && out.report.expected_hash == out.report.emergent_hash;
  return out;
}

CompiledScenario fig5_scenario(std::uint64_t seed) {
  StorageGraph data("fig5");
  const auto add = [&](std::uint32_t id, const char* label) { data.add_node(NodeId{id}, Label{label}); };
  add(1, "C");
  add(2, "S");
  add(3, "S");
  add(4, "N");
  add(5, "N");
  add(6, "N");
  data.set_active(NodeId{1});
  CompileOptions o;
  o.seed = seed;
  o.labels = LabelColorMap({{"C", Color::Red}, {"S", Color::Green}, {"N", Color::Uncolored}});
  o.layout = Layout{{NodeId{1}, {100, 100}}, {NodeId{2}, {88, 115}}, {NodeId{3}, {112, 115}},
                    {NodeId{4}, {100, 62}},  {NodeId{5}, {100, 46}},  {NodeId{6}, {100, 30}}};
  CompiledScenario c = compile_scenario(data, o);
  const std::map<std::string, double> mass{{"C", 2000.0}, {"S", 20.0}, {"N", 100.0}};
  for (auto& f : c.scenario.flakes) f.mass = mass.at(*f.label);

  const auto ref = [&](std::uint32_t id) { return NodeRef{NodeId{id}, data.label(NodeId{id})}; };
  std::vector<PrimOp> ops;
  const auto occupy = [&](std::uint32_t from, std::uint32_t n) {
    ops.push_back({OpKind::AddNode, {ref(n)}, {}});
    ops.push_back({OpKind::AddEdge, {ref(from), ref(n)}, {}});
    ops.push_back({OpKind::MoveActive, {ref(n)}, {}});
  };
  const auto leave = [&](std::uint32_t from, std::uint32_t n) {
    ops.push_back({OpKind::RemoveEdge, {ref(from), ref(n)}, {}});
    ops.push_back({OpKind::RemoveNode, {ref(n)}, {}});
  };
  occupy(1, 2);
  occupy(1, 3);
  leave(1, 2);
  leave(1, 3);
  occupy(1, 4);
  occupy(4, 5);
  occupy(5, 6);
  EventTrace expected;
  StorageGraph g = c.expected_initial;
  for (auto& op : ops) {
    apply_op(g, op);
    expected.push_back(TraceRecord{expected.size(), "fig5", std::move(op), normalized_hash(g)});
  }
  c.expected = std::move(expected);
  return c;
}

}  // namespace kum::real

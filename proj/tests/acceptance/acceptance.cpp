// One line per acceptance criterion; exit status 1 if any line is FAIL.
//
//   kum_acceptance [--only <id>]...

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

#include "generators.hpp"
#include "kum/core/canonical.hpp"
#include "kum/core/encode.hpp"
#include "kum/core/machine.hpp"
#include "kum/core/validate.hpp"
#include "kum/lang/parse.hpp"
#include "kum/lang/print.hpp"
#include "kum/real/realization.hpp"
#include "kum/sim/log.hpp"
#include "kum/sim/sim.hpp"
#include "kum/steer/session.hpp"
#include "programs.hpp"
#include "reference_interpreter.hpp"
#include "test_util.hpp"

namespace {

using namespace kum;
using sim::CellPos;
using sim::Color;
using sim::SimState;

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  std::string id;
  std::string title;
  std::function<Outcome()> run;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// Watches every vein of a run tick by tick. Speed and period must stay in the
// measured ranges and the direction must change exactly once per period:
// after age t the vein has reversed floor((t + phase) / period) times.
class FlowMonitor {
 public:
  void new_run() { ++run_; }

  void observe(const SimState& st) {
    for (const auto& [id, v] : st.veins) {
      ++samples_;
      if (v.flow_speed < 1.0 || v.flow_speed > 3.0 || v.period < 60.0 || v.period > 180.0) fail(id, "range");
      const double age = static_cast<double>(st.tick - v.born) * st.scenario.dt;
      const auto due = static_cast<std::uint64_t>(std::floor((age + v.phase) / v.period)) -
                       static_cast<std::uint64_t>(std::floor(v.phase / v.period));
      const int expect_sign = (static_cast<long long>(std::floor((age + v.phase) / v.period)) % 2 == 0) ? 1 : -1;
      auto [it, fresh] = seen_.try_emplace((run_ << 32) | id, Track{v.sign, due});
      if (!fresh && v.sign != it->second.sign) {
        it->second.sign = v.sign;
        ++it->second.flips;
      }
      if (v.sign != expect_sign) fail(id, "sign");
      if (it->second.flips != due || v.flips != due) fail(id, "flip count");
    }
  }
  std::size_t veins() const { return seen_.size(); }
  std::size_t samples() const { return samples_; }
  std::size_t violations() const { return violations_; }
  const std::string& first() const { return first_; }

 private:
  struct Track {
    int sign;
    std::uint64_t flips;
  };
  void fail(std::uint32_t id, const char* what) {
    if (violations_++ == 0) first_ = fmt("run %llu vein %u %s", static_cast<unsigned long long>(run_), id, what);
  }
  std::unordered_map<std::uint64_t, Track> seen_;
  std::uint64_t run_ = 0;
  std::size_t samples_ = 0;
  std::size_t violations_ = 0;
  std::string first_;
};

FlowMonitor g_flow;

// Starts a run whose veins the flow monitor follows.
SimState start_watched(const sim::Scenario& s) {
  g_flow.new_run();
  return sim::init_scenario(s);
}

void step_watched(SimState& st) {
  sim::sim_step(st);
  g_flow.observe(st);
}

// --- grow transition ---------------------------------------------------------

Outcome fig6() {
  const auto t0 = std::chrono::steady_clock::now();
  const Program p = testing::program_or_throw(testing::read_file(testing::sample("fig6.kum")));
  const StorageGraph g = testing::graph_or_throw(testing::read_file(testing::sample("fig6.kg")));
  const auto r = run(initial_state(g), p, 1);
  const auto secs = seconds_since(t0);
  std::vector<std::string> got;
  for (const auto& rec : r.trace) got.push_back(format_op(rec.op));
  const std::vector<std::string> want{"op=ADD_NODE args=3:C",         "op=ADD_EDGE args=1:A,3:C",
                                      "op=ADD_EDGE args=2:B,3:C",     "op=REMOVE_EDGE args=1:A,2:B",
                                      "op=MOVE_ACTIVE args=3:C"};
  StorageGraph expected("expected");
  expected.add_node(NodeId{1}, Label{"A"});
  expected.add_node(NodeId{2}, Label{"B"});
  expected.add_node(NodeId{3}, Label{"C"});
  expected.add_edge(NodeId{1}, NodeId{3});
  expected.add_edge(NodeId{2}, NodeId{3});
  expected.set_active(NodeId{3});
  const bool ops_ok = got == want;
  const bool iso = canonical_hash(r.final_state.graph) == canonical_hash(expected);
  return {ops_ok && iso && secs < 1.0,
          fmt("ops %s, final graph %s, %.3f s (< 1 s)", ops_ok ? "exact" : "differ", iso ? "canonically equal" : "differs",
              secs)};
}

// --- relocation --------------------------------------------------------------

Outcome fig5() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto c = real::fig5_scenario();
  const auto r = real::realize(c, 6000, real::kDefaultWindow);
  const auto secs = seconds_since(t0);
  std::string macro;
  for (const auto& rec : r.emergent) {
    const auto& l = rec.op.operands.empty() ? std::string() : rec.op.operands[0].label.name;
    if (rec.op.kind == OpKind::RemoveNode && l == "S") macro += 'R';
    if (rec.op.kind == OpKind::AddNode && l == "N") macro += 'A';
  }
  // Re-observe the flow contract on the same run.
  SimState st = start_watched(c.scenario);
  while (st.tick < r.log.ticks && st.running()) step_watched(st);
  const bool arena = c.scenario.width == 200 && c.scenario.height == 200;
  const bool pass = macro == "RRAAA" && r.report.pass() && r.report.window <= 4 && secs < 30 && arena;
  return {pass, fmt("macro-order %s (want RRAAA), conformance %s at W=%zu, matched %zu/%zu, %dx%d arena, %.2f s (< 30 s)",
                    macro.c_str(), r.report.pass() ? "PASS" : "FAIL", r.report.window, r.report.matched.size(),
                    c.expected->size(), c.scenario.width, c.scenario.height, secs)};
}

// --- degree band --------------------------------------------------------------

sim::Scenario twelve_flakes(std::uint64_t seed) {
  sim::Scenario s;
  s.name = "degree";
  s.seed = seed;
  std::mt19937_64 rng(seed * 7919 + 17);
  std::uniform_int_distribution<int> coord(15, 185);
  while (s.flakes.size() < 12) {
    const CellPos p{coord(rng), coord(rng)};
    const auto far = [&](CellPos q) { return std::hypot(p.x - q.x, p.y - q.y) >= 12; };
    if (!far(s.start)) continue;
    if (std::all_of(s.flakes.begin(), s.flakes.end(), [&](const auto& f) { return far(f.pos); }))
      s.flakes.push_back({p, Color::Uncolored});
  }
  return s;
}

Outcome degree_band() {
  const auto t0 = std::chrono::steady_clock::now();
  double sum = 0;
  int connected = 0;
  int max_strands = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    SimState st = start_watched(twelve_flakes(seed));
    while (st.running() && st.tick < 8000) {
      step_watched(st);
      for (const auto& [id, n] : st.nodes) max_strands = std::max(max_strands, sim::strands(st, id));
    }
    const auto g = sim::extract_graph(st).graph;
    const auto report = validate_graph(g, kMaxCanonicalNodes);
    const bool disconnected = std::any_of(report.violations.begin(), report.violations.end(),
                                          [](const auto& v) { return v.kind == ViolationKind::Disconnected; });
    connected += !disconnected;
    sum += sim::degree_stats(g).average;
  }
  const double mean = sum / 20;
  const bool pass = connected == 20 && max_strands <= 3 && mean >= 1.8 && mean <= 4.2;
  return {pass, fmt("mean average degree %.3f in [1.8, 4.2], %d/20 connected, max strands %d (<= 3), %.1f s", mean,
                    connected, max_strands, seconds_since(t0))};
}

// --- color preference ---------------------------------------------------------

Outcome color_preference() {
  const auto t0 = std::chrono::steady_clock::now();
  constexpr int kRuns = 100;
  constexpr int kArena = 100;
  constexpr double kRadius = 40;
  constexpr std::uint64_t kNever = 1'000'000'000;
  std::array<std::vector<double>, 5> ticks;
  int never = 0;
  for (int seed = 1; seed <= kRuns; ++seed) {
    sim::Scenario s;
    s.name = "color";
    s.width = s.height = kArena;
    s.start = {kArena / 2, kArena / 2};
    s.seed = static_cast<std::uint64_t>(seed);
    std::mt19937_64 rng(static_cast<std::uint64_t>(seed) * 104729 + 3);
    std::array<int, 5> perm{0, 1, 2, 3, 4};
    std::shuffle(perm.begin(), perm.end(), rng);
    const double offset = std::uniform_real_distribution<double>(0, 2 * std::numbers::pi)(rng);
    for (int i = 0; i < 5; ++i) {
      const double a = offset + 2 * std::numbers::pi * i / 5;
      s.flakes.push_back({{static_cast<int>(std::lround(kArena / 2 + kRadius * std::cos(a))),
                           static_cast<int>(std::lround(kArena / 2 + kRadius * std::sin(a)))},
                          static_cast<Color>(perm[static_cast<std::size_t>(i)])});
    }
    SimState st = start_watched(s);
    std::array<std::uint64_t, 5> occupied;
    occupied.fill(kNever);
    std::size_t done = 0;
    while (st.running() && st.tick < 6000 && done < 5) {
      const auto before = st.events.size();
      step_watched(st);
      for (std::size_t i = before; i < st.events.size(); ++i) {
        const auto& e = st.events[i];
        if (e.op != sim::SimOp::Occupy) continue;
        const auto c = static_cast<std::size_t>(st.flakes.at(e.ref - 1).color);
        if (occupied[c] == kNever) {
          occupied[c] = e.tick;
          ++done;
        }
      }
    }
    for (std::size_t c = 0; c < 5; ++c) {
      never += occupied[c] == kNever;
      ticks[c].push_back(static_cast<double>(occupied[c]));
    }
  }
  std::array<double, 5> med{};
  for (std::size_t c = 0; c < 5; ++c) {
    auto v = ticks[c];
    std::sort(v.begin(), v.end());
    med[c] = (v[v.size() / 2 - 1] + v[v.size() / 2]) / 2;
  }
  const double U = med[static_cast<int>(Color::Uncolored)], G = med[static_cast<int>(Color::Green)],
               Y = med[static_cast<int>(Color::Yellow)], B = med[static_cast<int>(Color::Blue)],
               R = med[static_cast<int>(Color::Red)];
  const double lo = std::min(Y, B), hi = std::max(Y, B);
  const bool order = U < G && G < lo && hi < R;
  const bool tie = std::abs(Y - B) < std::min(lo - G, R - hi);
  return {order && tie,
          fmt("median occupation ticks U %.0f < G %.0f < {Y %.0f, B %.0f} < R %.0f; |Y-B| %.0f < gaps (%.0f, %.0f); "
              "%d never reached; %.1f s",
              U, G, Y, B, R, std::abs(Y - B), lo - G, R - hi, never, seconds_since(t0))};
}

// --- flow contract (accumulated over every run above) ------------------------

Outcome flow_contract() {
  // A dedicated long run adds veins that live through many periods.
  sim::Scenario s;
  s.name = "flow";
  s.width = s.height = 120;
  s.start = {60, 60};
  s.flakes = {{{20, 25}, Color::Green, 5000.0}, {{95, 30}, Color::Uncolored, 5000.0}, {{30, 95}, Color::Red, 5000.0}};
  SimState st = start_watched(s);
  while (st.running() && st.tick < 4000) step_watched(st);
  return {g_flow.violations() == 0 && g_flow.veins() > 0,
          fmt("%zu veins watched over %zu vein-ticks, %zu violations%s%s", g_flow.veins(), g_flow.samples(),
              g_flow.violations(), g_flow.violations() ? ", first: " : "", g_flow.first().c_str())};
}

// --- halting ------------------------------------------------------------------

sim::Scenario depleting(double far_mass) {
  sim::Scenario s;
  s.name = "halting";
  s.width = 60;
  s.height = 40;
  s.start = {15, 20};
  s.flakes = {{{15, 20}, Color::Uncolored, 2.0}, {{40, 20}, Color::Green, far_mass}};
  s.params.w_noise = 0;
  return s;
}

Outcome halting() {
  SimState dark = start_watched(depleting(5.0));
  while (dark.running() && dark.tick < 5000) step_watched(dark);
  const auto events = dark.events.size();
  const auto graph = sim::extract_graph(dark).graph;
  int refused = 0;
  for (int i = 0; i < 100; ++i) {
    try {
      sim::sim_step(dark);
    } catch (const Error& e) {
      refused += e.code() == ErrorCode::HaltedError;
    }
  }
  try {
    sim::apply_intervention(dark, sim::PlaceFlake{{{5, 5}, Color::Red}});
  } catch (const Error& e) {
    refused += e.code() == ErrorCode::HaltedError;
  }
  const bool frozen = dark.events.size() == events && sim::extract_graph(dark).graph == graph && refused == 101;

  auto lit_s = depleting(5.0);
  lit_s.lights = {{0, 0, 59, 39, 0.6}};
  lit_s.params.escape_light = 0.9;
  SimState lit = start_watched(lit_s);
  while (lit.running() && lit.tick < 5000) step_watched(lit);
  const bool light_ok = sim::ambient_light(lit) >= lit.scenario.params.fructify_light;

  const bool pass = dark.status == sim::HaltStatus::Sclerotium && frozen &&
                    lit.status == sim::HaltStatus::Fructify && light_ok;
  return {pass, fmt("darkness -> %s at tick %llu, %s after; light %.2f -> %s at tick %llu",
                    std::string(sim::to_string(dark.status)).c_str(), static_cast<unsigned long long>(dark.tick),
                    frozen ? "zero graph ops" : "STATE CHANGED", sim::ambient_light(lit),
                    std::string(sim::to_string(lit.status)).c_str(), static_cast<unsigned long long>(lit.tick))};
}

// --- KUM smoke ----------------------------------------------------------------

// Machine and reference interpreter must agree on everything observable.
bool agree(const Program& p, const StorageGraph& input, std::vector<std::string>& word) {
  const auto r = run(initial_state(input), p, 10000);
  const auto ref = testing::reference_run(input, p, 10000);
  auto ref_graph = testing::from_ref(ref.graph);
  ref_graph.set_name(input.name());
  if (r.reason != StopReason::Halted || ref.status != testing::RefStatus::Halted) return false;
  if (!(r.final_state.graph == ref_graph) || r.final_state.output != ref.output) return false;
  if (r.final_state.step_count != ref.steps || r.trace.size() != ref.ops) return false;
  word = decode_output(r.final_state.graph);
  return true;
}

Outcome kum_smoke() {
  const auto load = [](const char* n) { return testing::program_or_throw(testing::read_file(testing::sample(n))); };
  const Program succ = load("successor.kum");
  const Program app = load("append.kum");
  std::size_t ok = 0, total = 0;
  for (std::size_t n = 0; n <= 8; ++n) {
    std::vector<std::string> out;
    ++total;
    ok += agree(succ, encode_input(std::vector<std::string>(n, "u"), {"u"}), out) &&
          out == std::vector<std::string>(n + 1, "u");
  }
  const std::size_t succ_ok = ok;
  testing::for_each_word({"a", "b"}, 8, [&](const testing::Word& left) {
    testing::for_each_word({"a", "b"}, 8 - left.size(), [&](const testing::Word& right) {
      testing::Word input = left;
      input.push_back("sep");
      input.insert(input.end(), right.begin(), right.end());
      testing::Word want = left;
      want.insert(want.end(), right.begin(), right.end());
      std::vector<std::string> out;
      ++total;
      ok += agree(app, encode_input(input, {"a", "b", "sep"}), out) && out == want;
    });
  });
  return {ok == total, fmt("successor %zu/9, append %zu/%zu (all inputs n <= 8) agree with the reference interpreter",
                           succ_ok, ok - succ_ok, total - 9)};
}

// --- canonical hash vs brute force --------------------------------------------

// Rooted two-colored graph on vertices 0..n-1, root 0.
struct Small {
  int n = 0;
  std::array<std::uint8_t, 7> adj{};
  std::uint8_t color = 0;
};

// Brute-force certificate: vertices are grouped by (root, color, degree), and
// the adjacency code is minimized over every permutation inside the groups.
std::pair<std::uint64_t, std::uint64_t> brute_form(const Small& g) {
  std::array<int, 7> key{};
  for (int v = 0; v < g.n; ++v)
    key[v] = (v == 0 ? 0 : 16) + ((g.color >> v) & 1) * 8 + std::popcount(static_cast<unsigned>(g.adj[v]));
  std::vector<int> p(static_cast<std::size_t>(g.n));
  for (int i = 0; i < g.n; ++i) p[i] = i;
  std::sort(p.begin(), p.end(), [&](int a, int b) { return key[a] < key[b] || (key[a] == key[b] && a < b); });
  std::uint64_t sig = static_cast<std::uint64_t>(g.n);
  for (int v : p) sig = sig * 32 + static_cast<std::uint64_t>(key[v]);
  std::vector<std::pair<int, int>> groups;
  for (int i = 0; i < g.n;) {
    int j = i;
    while (j < g.n && key[p[j]] == key[p[i]]) ++j;
    groups.emplace_back(i, j);
    i = j;
  }
  std::uint64_t best = UINT64_MAX;
  for (;;) {
    std::uint64_t code = 0;
    for (int i = 0; i < g.n; ++i)
      for (int j = i + 1; j < g.n; ++j) code = code * 2 + ((g.adj[p[i]] >> p[j]) & 1);
    best = std::min(best, code);
    int k = static_cast<int>(groups.size()) - 1;
    for (; k >= 0; --k)
      if (std::next_permutation(p.begin() + groups[k].first, p.begin() + groups[k].second)) break;
    if (k < 0) break;
  }
  return {sig, best};
}

StorageGraph to_storage(const Small& g) {
  StorageGraph s;
  for (int v = 0; v < g.n; ++v)
    s.add_node(NodeId{static_cast<std::uint32_t>(v + 1)}, Label{((g.color >> v) & 1) ? "B" : "A"});
  for (int v = 0; v < g.n; ++v)
    for (int w = v + 1; w < g.n; ++w)
      if ((g.adj[v] >> w) & 1) s.add_edge(NodeId{static_cast<std::uint32_t>(v + 1)}, NodeId{static_cast<std::uint32_t>(w + 1)});
  s.set_active(NodeId{1});
  return s;
}

struct PairHash {
  std::size_t operator()(const std::pair<std::uint64_t, std::uint64_t>& k) const {
    return std::hash<std::uint64_t>{}(k.first * 0x9e3779b97f4a7c15ull ^ k.second);
  }
};

// Every rooted graph on n vertices arises from one on n - 1 by adding a
// vertex, so extending one representative per class reaches every class.
// Within a class the hash must be constant; across classes it must differ.
Outcome canonical_exhaustive() {
  const auto t0 = std::chrono::steady_clock::now();
  std::vector<Small> reps{{1, {}, 0}, {1, {}, 1}};
  std::size_t classes = 2, checked = 2, disagreements = 0;
  if (canonical_hash(to_storage(reps[0])) == canonical_hash(to_storage(reps[1]))) ++disagreements;
  for (int n = 2; n <= 7; ++n) {
    std::unordered_map<std::pair<std::uint64_t, std::uint64_t>, std::string, PairHash> hash_of;
    std::unordered_map<std::string, std::pair<std::uint64_t, std::uint64_t>> class_of;
    std::vector<Small> next;
    for (const Small& r : reps)
      for (int c = 0; c < 2; ++c)
        for (unsigned s = 0; s < (1u << (n - 1)); ++s) {
          Small g = r;
          g.n = n;
          g.color = static_cast<std::uint8_t>(r.color | (c << (n - 1)));
          for (int v = 0; v < n - 1; ++v)
            if ((s >> v) & 1) {
              g.adj[v] |= static_cast<std::uint8_t>(1u << (n - 1));
              g.adj[n - 1] |= static_cast<std::uint8_t>(1u << v);
            }
          ++checked;
          const auto h = canonical_hash(to_storage(g));
          const auto f = brute_form(g);
          const auto [it, fresh] = hash_of.emplace(f, h);
          if (!fresh) {
            disagreements += it->second != h;
            continue;
          }
          next.push_back(g);
          const auto [jt, new_hash] = class_of.emplace(h, f);
          disagreements += !new_hash && jt->second != f;
        }
    classes += next.size();
    reps = std::move(next);
  }
  const double secs = seconds_since(t0);
  return {disagreements == 0 && secs < 60,
          fmt("%zu isomorphism classes on 1..7 nodes over {A,B}, %zu graphs checked, %zu disagreements, %.1f s (< 60 s)",
              classes, checked, disagreements, secs)};
}

// --- parser -------------------------------------------------------------------

Outcome parser() {
  const auto t0 = std::chrono::steady_clock::now();
  std::size_t corpus = 0, corpus_ok = 0;
  for (const auto& entry : std::filesystem::directory_iterator(KUM_SAMPLES)) {
    const auto path = entry.path();
    const std::string text = testing::read_file(path.string());
    if (path.extension() == ".kum") {
      ++corpus;
      const auto r = lang::parse_program(text, path.string());
      if (!r.ok()) continue;
      const auto printed = lang::print_program(*r.value);
      const auto again = lang::parse_program(printed);
      corpus_ok += again.ok() && *again.value == *r.value && lang::print_program(*again.value) == printed;
    } else if (path.extension() == ".kg") {
      ++corpus;
      const auto r = lang::parse_graph(text, path.string());
      if (!r.ok()) continue;
      const auto printed = lang::print_graph(*r.value);
      const auto again = lang::parse_graph(printed);
      corpus_ok += again.ok() && *again.value == *r.value && lang::print_graph(*again.value) == printed;
    }
  }
  std::mt19937_64 rng(1);
  std::size_t generated_ok = 0;
  for (int i = 0; i < 1000; ++i) {
    const Program p = testing::random_program(rng);
    const auto text = lang::print_program(p);
    const auto r = lang::parse_program(text);
    generated_ok += r.ok() && *r.value == p && lang::print_program(*r.value) == text;
  }
  const std::vector<std::string> seeds{testing::read_file(testing::sample("fig6.kum")),
                                       testing::read_file(testing::sample("append.kum")),
                                       testing::read_file(testing::sample("successor.kg")), ""};
  std::size_t crashes = 0, accepted = 0;
  for (int i = 0; i < 100000; ++i) {
    const auto text = testing::mutate(seeds[static_cast<std::size_t>(i) % seeds.size()], rng);
    try {
      const auto p = lang::parse_program(text);
      const auto g = lang::parse_graph(text);
      if (p.ok()) {
        ++accepted;
        const auto again = lang::parse_program(lang::print_program(*p.value));
        crashes += !again.ok() || !(*again.value == *p.value);
      }
      (void)g;
    } catch (...) {
      ++crashes;
    }
  }
  return {corpus > 0 && corpus_ok == corpus && generated_ok == 1000 && crashes == 0,
          fmt("corpus %zu/%zu, generated %zu/1000 round-trip; 100000 fuzz inputs, %zu accepted, %zu failures; %.1f s",
              corpus_ok, corpus, generated_ok, accepted, crashes, seconds_since(t0))};
}

// --- determinism --------------------------------------------------------------

Outcome determinism() {
  const auto g = testing::graph_or_throw(testing::read_file(testing::sample("fig6.kg")));
  real::CompileOptions o;
  o.seed = 7;
  const auto compiled = real::compile_scenario(g, o);
  const auto a = sim::log_text(real::realize(compiled).log);
  const auto b = sim::log_text(real::realize(real::compile_scenario(g, o)).log);
  const auto f1 = sim::log_text(real::realize(real::fig5_scenario(42)).log);
  const auto f2 = sim::log_text(real::realize(real::fig5_scenario(42)).log);

  using nlohmann::json;
  steer::SessionRegistry reg;
  const json scen = {{"arena", {{"width", 100}, {"height", 100}}},
                     {"seed", 5},
                     {"start", {{"x", 50}, {"y", 50}}},
                     {"flakes", {{{"x", 15}, {"y", 20}, {"color", "Green"}}, {{"x", 85}, {"y", 30}}, {{"x", 50}, {"y", 90}, {"color", "Red"}}}}};
  const auto id = reg.handle(1, {{"type", "create"}, {"scenario", scen}}).back().message.at("session");
  const json ivs[] = {{{"type", "PlaceFlake"}, {"x", 70}, {"y", 70}, {"color", "Blue"}},
                      {{"type", "PlaceLight"}, {"x0", 0}, {"y0", 0}, {"x1", 30}, {"y1", 99}, {"intensity", 0.3}},
                      {{"type", "RemoveLight"}}};
  for (const auto& iv : ivs) {
    reg.handle(1, {{"type", "step"}, {"session", id}, {"n", 150}});
    reg.handle(1, {{"type", "intervene"}, {"session", id}, {"intervention", iv}});
  }
  reg.handle(1, {{"type", "step"}, {"session", id}, {"n", 150}});
  const auto exported = reg.handle(1, {{"type", "export_log"}, {"session", id}}).back().message.at("text").get<std::string>();
  const auto replayed = sim::log_text(sim::make_log(sim::replay(sim::parse_log(exported))));
  const bool pass = a == b && f1 == f2 && exported == replayed && !a.empty();
  return {pass, fmt("realize twice: %s (fig6 seed 7, %zu bytes), %s (fig5); session log replay: %s (%zu bytes)",
                    a == b ? "identical" : "DIFFERENT", a.size(), f1 == f2 ? "identical" : "DIFFERENT",
                    exported == replayed ? "identical" : "DIFFERENT", exported.size())};
}

}  // namespace

int main(int argc, char** argv) {
  std::set<std::string> only;
  for (int i = 1; i + 1 < argc; i += 2)
    if (std::string(argv[i]) == "--only") only.insert(argv[i + 1]);

  // flow-contract comes after the runs whose veins it accumulates.
  const std::vector<Criterion> criteria{
      {"fig6-transition", "Grow rule ops and final graph", fig6},
      {"fig5-relocation", "Relocation macro-order and conformance", fig5},
      {"degree-band", "Degree band over seeds 1-20, 12 flakes", degree_band},
      {"color-preference", "Color preference over 100 seeded runs", color_preference},
      {"halting", "Sclerotium in darkness, Fructify under light", halting},
      {"flow-contract", "Vein flow speed, period and reversals", flow_contract},
      {"kum-smoke", "Successor and append for all inputs n <= 8", kum_smoke},
      {"canonical-hash", "canonical_hash vs brute force, <= 7 nodes", canonical_exhaustive},
      {"parser", "Parser round-trip and fuzz", parser},
      {"determinism", "Realize and session replay are byte-identical", determinism},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    if (!only.empty() && !only.contains(c.id)) continue;
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::printf("%s  %-17s %s: %s\n", o.pass ? "PASS" : "FAIL", c.id.c_str(), c.title.c_str(), o.detail.c_str());
    std::fflush(stdout);
  }
  return failed ? 1 : 0;
}

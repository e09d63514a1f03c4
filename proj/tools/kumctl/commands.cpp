#include "commands.hpp"

#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "kum/core/canonical.hpp"
#include "kum/core/error.hpp"
#include "kum/core/machine.hpp"
#include "kum/lang/lint.hpp"
#include "kum/lang/parse.hpp"
#include "kum/lang/print.hpp"
#include "kum/real/realization.hpp"
#include "kum/sim/log.hpp"
#include "kum/sim/sim.hpp"
#include "kum/sim/snapshot.hpp"
#include "steering_server.hpp"

namespace kum::cli {

namespace {

constexpr std::uint64_t kDefaultSeed = 42;

// Reported as exit 2 with its message.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Writes to `path`, or to `fallback` when path is empty.
template <typename F>
void emit(const std::string& path, std::ostream& fallback, F&& write) {
  if (path.empty()) return write(fallback);
  std::ofstream f(path, std::ios::binary);
  if (!f) throw UsageError("cannot write '" + path + "'");
  write(f);
  if (!f) throw UsageError("write failed for '" + path + "'");
}

std::uint64_t resolve_seed(std::uint64_t seed, std::ostream& err) {
  if (seed != 0) return seed;
  std::random_device rd;
  const std::uint64_t s = (std::uint64_t{rd()} << 32) | rd();
  err << "seed 0: using entropy seed " << s << " (not reproducible)\n";
  return s == 0 ? 1 : s;
}

bool ends_with(const std::string& s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

template <typename T>
T parsed_or_throw(lang::ParseResult<T> r, std::ostream& err) {
  for (const auto& d : r.diagnostics) err << lang::format(d) << '\n';
  if (!r.ok()) throw UsageError("input has errors");
  return std::move(*r.value);
}

Program load_program(const std::string& path, std::ostream& err) {
  return parsed_or_throw(lang::parse_program(read_file(path), path), err);
}

StorageGraph load_graph(const std::string& path, std::ostream& err, std::size_t degree_bound = 3) {
  return parsed_or_throw(lang::parse_graph(read_file(path), path, degree_bound), err);
}

struct Options {
  std::vector<std::string> inputs;
  std::uint64_t seed = kDefaultSeed;
  bool seed_given = false;
  std::uint64_t max_steps = 10000;
  std::uint64_t ticks = 6000;
  std::string out;
  std::string expected;
  std::size_t window = real::kDefaultWindow;
  std::string format = "text";
  std::string snapshot_out;
  int scale = 2;
  std::string address = "127.0.0.1";
  unsigned short port = 8080;
  bool fig5 = false;
};

int cmd_run(const Options& o, std::ostream& out, std::ostream& err) {
  const Program prog = load_program(o.inputs.at(0), err);
  const StorageGraph g = load_graph(o.inputs.at(1), err, prog.degree_bound);
  const auto result = run(initial_state(g), prog, o.max_steps);
  emit(o.out, out, [&](std::ostream& s) { write_trace(s, result.trace); });
  err << "stop=" << to_string(result.reason) << " steps=" << result.final_state.step_count
      << " nodes=" << result.final_state.graph.node_count();
  if (!result.final_state.output.empty()) err << " output=" << lang::quote_string(result.final_state.output);
  err << '\n';
  if (result.reason == StopReason::InvariantBreach) {
    err << "invariant breach: " << result.breach << '\n';
    return kBreach;
  }
  return kOk;
}

int cmd_sim(const Options& o, std::ostream& out, std::ostream& err) {
  sim::Scenario s = sim::load_scenario(o.inputs.at(0));
  if (o.seed_given) s.seed = resolve_seed(o.seed, err);
  sim::SimState st = sim::init_scenario(s);
  sim::run_until(st, o.ticks);
  emit(o.out, out, [&](std::ostream& f) { sim::write_log(f, sim::make_log(st)); });
  if (!o.snapshot_out.empty())
    emit(o.snapshot_out, out, [&](std::ostream& f) { f << sim::snapshot(st).dump() << '\n'; });
  err << "ticks=" << st.tick << " status=" << sim::to_string(st.status) << " events=" << st.events.size() << '\n';
  return kOk;
}

int cmd_realize(const Options& o, std::ostream& out, std::ostream& err) {
  const std::uint64_t seed = resolve_seed(o.seed, err);
  real::CompiledScenario compiled;
  if (o.fig5) {
    if (!o.inputs.empty() || !o.expected.empty()) throw UsageError("--fig5 takes no graph or --expected");
    compiled = real::fig5_scenario(seed);
  } else {
    if (o.inputs.size() != 1) throw UsageError("realize needs one graph file (or --fig5)");
    real::CompileOptions opts;
    opts.seed = seed;
    if (!o.expected.empty()) opts.expected = parse_trace(read_file(o.expected));
    compiled = real::compile_scenario(load_graph(o.inputs[0], err), opts);
  }
  const auto r = real::realize(compiled, o.ticks, o.window);
  const EventTrace& expected = *compiled.expected;
  if (!o.out.empty()) emit(o.out, out, [&](std::ostream& f) { sim::write_log(f, r.log); });
  if (o.format == "records")
    real::write_report_records(out, r.report, expected, r.emergent);
  else
    real::write_report_text(out, r.report, expected, r.emergent);
  err << "ticks=" << r.log.ticks << " status=" << sim::to_string(r.log.status) << " verdict="
      << (r.report.pass() ? "PASS" : "FAIL") << '\n';
  return r.report.pass() ? kOk : kFail;
}

void write_stats(std::ostream& out, const sim::DegreeStats& s) {
  out << "nodes=" << s.nodes << " edges=" << s.edges << " average=" << s.average << " max=" << s.max << '\n';
  for (const auto& [d, n] : s.histogram) out << "degree=" << d << " count=" << n << '\n';
}

int cmd_stats(const Options& o, std::ostream& out, std::ostream& err) {
  const auto& path = o.inputs.at(0);
  StorageGraph g;
  if (ends_with(path, ".kg")) {
    g = load_graph(path, err, kMaxCanonicalNodes);
  } else {
    const auto log = sim::parse_log(read_file(path));
    const sim::SimState st = sim::init_scenario(log.config);
    g = real::replay_trace(sim::initial_graph(st), real::map_events(log.events));
    err << "graph after " << log.ticks << " ticks (" << log.events.size() << " events)\n";
  }
  write_stats(out, sim::degree_stats(g));
  return kOk;
}

int cmd_render(const Options& o, std::ostream& out, std::ostream& err) {
  if (o.out.empty()) throw UsageError("render needs --out <file.svg|file.ppm>");
  nlohmann::json snap;
  try {
    snap = nlohmann::json::parse(read_file(o.inputs.at(0)));
  } catch (const nlohmann::json::exception& e) {
    throw UsageError(std::string("bad snapshot: ") + e.what());
  }
  if (ends_with(o.out, ".svg"))
    emit(o.out, out, [&](std::ostream& f) { sim::render_svg(snap, f); });
  else if (ends_with(o.out, ".ppm"))
    emit(o.out, out, [&](std::ostream& f) { sim::render_ppm(snap, f, o.scale); });
  else
    throw UsageError("output must end in .svg or .ppm");
  err << "wrote " << o.out << '\n';
  return kOk;
}

int cmd_replay(const Options& o, std::ostream& out, std::ostream& err) {
  const auto log = sim::parse_log(read_file(o.inputs.at(0)));
  const auto check = sim::check_replay(log);
  if (check.identical) {
    out << "replay identical=true events=" << log.events.size() << " ticks=" << log.ticks << '\n';
    return kOk;
  }
  out << "replay identical=false first_mismatch=" << check.first_mismatch << '\n';
  err << check.detail << '\n';
  return kFail;
}

int cmd_lint(const Options& o, std::ostream& out, std::ostream& err) {
  const Program prog = load_program(o.inputs.at(0), err);
  std::vector<lang::Diagnostic> diags;
  for (const auto& f : lang::lint_program(prog)) diags.push_back(lang::to_diagnostic(f));
  for (const auto& d : diags) out << lang::format(d) << '\n';
  err << diags.size() << " finding(s)\n";
  return lang::has_errors(diags) ? kFail : kOk;
}

int cmd_serve(const Options& o, std::ostream&, std::ostream& err) {
  steer::SteeringServer server(o.address, o.port);
  err << "listening on " << o.address << ':' << server.port() << " (ws /session, GET /healthz)\n";
  server.run();
  return kOk;
}

}  // namespace

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Kolmogorov-Uspensky machine and Physarum realization toolkit", "kumctl"};
  app.require_subcommand(1);
  Options o;

  const auto seed_opt = [&](CLI::App* c) {
    return c->add_option("--seed", o.seed, "RNG seed; 0 requests an entropy seed (not reproducible)")
        ->capture_default_str();
  };

  auto* run_cmd = app.add_subcommand("run", "Run a program on a storage graph and print its trace");
  run_cmd->add_option("program", o.inputs, "program.kum then graph.kg")->required()->expected(2);
  run_cmd->add_option("--max-steps", o.max_steps, "Step limit")->capture_default_str();
  run_cmd->add_option("--out", o.out, "Write the trace here instead of stdout");

  auto* sim_cmd = app.add_subcommand("sim", "Simulate a scenario and print its event log");
  sim_cmd->add_option("scenario", o.inputs, "Scenario JSON")->required()->expected(1);
  auto* sim_seed = seed_opt(sim_cmd);
  sim_cmd->add_option("--ticks", o.ticks, "Tick limit")->capture_default_str();
  sim_cmd->add_option("--out", o.out, "Write the event log here instead of stdout");
  sim_cmd->add_option("--snapshot", o.snapshot_out, "Write the final snapshot JSON here");

  auto* real_cmd = app.add_subcommand("realize", "Compile a graph to an arena, simulate, and check conformance");
  real_cmd->add_option("graph", o.inputs, "Data graph (.kg)")->expected(0, 1);
  real_cmd->add_flag("--fig5", o.fig5, "Use the built-in relocation scenario instead of a graph");
  seed_opt(real_cmd);
  real_cmd->add_option("--expected", o.expected, "Expected trace of the user's SET schedule");
  real_cmd->add_option("--window", o.window, "Alignment tolerance W")->capture_default_str();
  real_cmd->add_option("--ticks", o.ticks, "Tick limit")->capture_default_str();
  real_cmd->add_option("--out", o.out, "Write the event log here");
  real_cmd->add_option("--format", o.format, "Report format")
      ->check(CLI::IsMember({"text", "records"}))
      ->capture_default_str();

  auto* stats_cmd = app.add_subcommand("stats", "Degree statistics of an event log's graph or a .kg file");
  stats_cmd->add_option("input", o.inputs, "Event log or .kg")->required()->expected(1);

  auto* render_cmd = app.add_subcommand("render", "Render a snapshot to SVG or PPM");
  render_cmd->add_option("snapshot", o.inputs, "Snapshot JSON")->required()->expected(1);
  render_cmd->add_option("-o,--out", o.out, "Output file (.svg or .ppm)")->required();
  render_cmd->add_option("--scale", o.scale, "Pixels per cell (PPM)")->check(CLI::Range(1, 16))->capture_default_str();

  auto* replay_cmd = app.add_subcommand("replay", "Re-execute an event log and compare");
  replay_cmd->add_option("log", o.inputs, "Event log")->required()->expected(1);

  auto* lint_cmd = app.add_subcommand("lint", "Static checks of a program");
  lint_cmd->add_option("program", o.inputs, "Program (.kum)")->required()->expected(1);

  auto* serve_cmd = app.add_subcommand("serve", "Start the steering server");
  serve_cmd->add_option("--address", o.address, "Listen address")->capture_default_str();
  serve_cmd->add_option("--port", o.port, "Listen port (0 picks one)")->capture_default_str();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }
  o.seed_given = sim_seed->count() > 0;

  try {
    if (run_cmd->parsed()) return cmd_run(o, out, err);
    if (sim_cmd->parsed()) return cmd_sim(o, out, err);
    if (real_cmd->parsed()) return cmd_realize(o, out, err);
    if (stats_cmd->parsed()) return cmd_stats(o, out, err);
    if (render_cmd->parsed()) return cmd_render(o, out, err);
    if (replay_cmd->parsed()) return cmd_replay(o, out, err);
    if (lint_cmd->parsed()) return cmd_lint(o, out, err);
    if (serve_cmd->parsed()) return cmd_serve(o, out, err);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return e.code() == ErrorCode::InvariantBreach ? kBreach : kUsage;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kBreach;
  }
  return kUsage;
}

}  // namespace kum::cli

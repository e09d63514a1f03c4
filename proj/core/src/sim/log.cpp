#include "kum/sim/log.hpp"

#include <charconv>
#include <ostream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "kum/core/error.hpp"
#include "kum/sim/sim.hpp"

namespace kum::sim {

namespace {

constexpr std::string_view kHeader = "# kum-sim event log v1";

std::optional<SimOp> sim_op_from_string(std::string_view s) {
  for (SimOp op : {SimOp::Occupy, SimOp::Branch, SimOp::VeinComplete, SimOp::VeinRetract, SimOp::NodeAbandoned,
                   SimOp::ActiveMoved, SimOp::Halt, SimOp::Intervene})
    if (to_string(op) == s) return op;
  return std::nullopt;
}

template <typename T>
bool parse_uint(std::string_view s, T& out) {
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && p == s.data() + s.size() && !s.empty();
}

// Splits off the next space-delimited token.
std::string_view next_token(std::string_view& rest) {
  while (!rest.empty() && rest.front() == ' ') rest.remove_prefix(1);
  const auto sp = rest.find(' ');
  const std::string_view tok = rest.substr(0, sp);
  rest = sp == std::string_view::npos ? std::string_view{} : rest.substr(sp + 1);
  return tok;
}

std::optional<SimEvent> fail(std::string* error, std::string msg) {
  if (error) *error = std::move(msg);
  return std::nullopt;
}

}  // namespace

std::optional<HaltStatus> halt_status_from_string(std::string_view s) noexcept {
  for (HaltStatus h : {HaltStatus::Running, HaltStatus::Sclerotium, HaltStatus::Fructify})
    if (to_string(h) == s) return h;
  return std::nullopt;
}

std::string format_event(const SimEvent& e) {
  std::string s = "tick=" + std::to_string(e.tick) + " op=" + std::string(to_string(e.op)) + " args=";
  for (std::size_t i = 0; i < e.nodes.size(); ++i) {
    if (i) s += ',';
    s += format_ref(e.nodes[i]);
  }
  switch (e.op) {
    case SimOp::Occupy: s += " flake=" + std::to_string(e.ref); break;
    case SimOp::VeinComplete:
    case SimOp::VeinRetract: s += " vein=" + std::to_string(e.ref); break;
    case SimOp::Branch: s += " at=" + e.text; break;
    case SimOp::Halt: s += " mode=" + e.text; break;
    case SimOp::Intervene: s += " data=" + e.text; break;
    default: break;
  }
  return s;
}

std::optional<SimEvent> parse_event(std::string_view line, std::string* error) {
  SimEvent e;
  std::string_view rest = line;
  std::string_view tok = next_token(rest);
  if (!tok.starts_with("tick=") || !parse_uint(tok.substr(5), e.tick)) return fail(error, "expected tick=<n>");
  tok = next_token(rest);
  if (!tok.starts_with("op=")) return fail(error, "expected op=<OP>");
  const auto op = sim_op_from_string(tok.substr(3));
  if (!op) return fail(error, "unknown op '" + std::string(tok.substr(3)) + "'");
  e.op = *op;
  tok = next_token(rest);
  if (!tok.starts_with("args=")) return fail(error, "expected args=");
  std::string_view args = tok.substr(5);
  while (!args.empty()) {
    const auto comma = args.find(',');
    NodeRef r;
    if (!parse_ref(args.substr(0, comma), r)) return fail(error, "bad node reference");
    e.nodes.push_back(std::move(r));
    if (comma == std::string_view::npos) break;
    args.remove_prefix(comma + 1);
  }
  std::size_t want = 0;
  switch (e.op) {
    case SimOp::Occupy:
    case SimOp::VeinComplete:
    case SimOp::VeinRetract:
    case SimOp::ActiveMoved: want = 2; break;
    case SimOp::Branch:
    case SimOp::NodeAbandoned: want = 1; break;
    default: break;
  }
  if (e.nodes.size() != want) return fail(error, "wrong number of node references for " + std::string(tok));

  const auto field = [&](std::string_view key) -> std::optional<std::string_view> {
    while (!rest.empty() && rest.front() == ' ') rest.remove_prefix(1);
    if (!rest.starts_with(key) || rest.size() <= key.size() || rest[key.size()] != '=') return std::nullopt;
    std::string_view v = rest.substr(key.size() + 1);
    rest = {};
    return v;
  };
  switch (e.op) {
    case SimOp::Occupy:
    case SimOp::VeinComplete:
    case SimOp::VeinRetract: {
      const auto v = field(e.op == SimOp::Occupy ? "flake" : "vein");
      if (!v || !parse_uint(*v, e.ref)) return fail(error, "missing or bad id field");
      break;
    }
    case SimOp::Branch:
    case SimOp::Halt:
    case SimOp::Intervene: {
      const auto v = field(e.op == SimOp::Branch ? "at" : e.op == SimOp::Halt ? "mode" : "data");
      if (!v) return fail(error, "missing payload field");
      e.text = std::string(*v);
      break;
    }
    default: break;
  }
  while (!rest.empty() && rest.front() == ' ') rest.remove_prefix(1);
  if (!rest.empty()) return fail(error, "trailing text '" + std::string(rest) + "'");
  return e;
}

EventLog make_log(const SimState& st) { return EventLog{st.scenario, st.events, st.tick, st.status}; }

void write_log(std::ostream& out, const EventLog& log) {
  nlohmann::json config = log.config;
  out << kHeader << '\n' << "config " << config.dump() << '\n';
  for (const auto& e : log.events) out << format_event(e) << '\n';
  out << "end ticks=" << log.ticks << " status=" << to_string(log.status) << '\n';
}

std::string log_text(const EventLog& log) {
  std::ostringstream os;
  write_log(os, log);
  return os.str();
}

EventLog parse_log(std::string_view text) {
  EventLog log;
  bool have_config = false;
  bool have_end = false;
  std::size_t lineno = 0;
  const auto bad = [&](const std::string& msg) {
    throw Error(ErrorCode::ParseError, "line " + std::to_string(lineno) + ": " + msg);
  };
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty() || line.front() == '#') continue;
    if (have_end) bad("content after end line");
    if (line.starts_with("config ")) {
      if (have_config) bad("duplicate config line");
      nlohmann::json j;
      try {
        j = nlohmann::json::parse(line.substr(7));
      } catch (const nlohmann::json::exception& ex) {
        bad(std::string("config is not JSON: ") + ex.what());
      }
      log.config = scenario_from_json(j);
      have_config = true;
    } else if (line.starts_with("end ")) {
      std::string_view rest = line.substr(4);
      const std::string_view t = next_token(rest);
      const std::string_view s = next_token(rest);
      if (!t.starts_with("ticks=") || !parse_uint(t.substr(6), log.ticks)) bad("expected ticks=<n>");
      const auto h = s.starts_with("status=") ? halt_status_from_string(s.substr(7)) : std::nullopt;
      if (!h) bad("expected status=<Running|Sclerotium|Fructify>");
      log.status = *h;
      have_end = true;
    } else {
      if (!have_config) bad("event before config line");
      std::string err;
      auto e = parse_event(line, &err);
      if (!e) bad(err);
      if (!log.events.empty() && e->tick < log.events.back().tick) bad("events out of tick order");
      log.events.push_back(std::move(*e));
    }
  }
  if (!have_config) bad("missing config line");
  if (!have_end) bad("missing end line");
  return log;
}

SimState replay(const EventLog& log) {
  SimState st = init_scenario(log.config);
  run_until(st, log.ticks);
  apply_scheduled(st);
  return st;
}

ReplayCheck check_replay(const EventLog& recorded) {
  const SimState st = replay(recorded);
  ReplayCheck c;
  const auto& got = st.events;
  const auto& want = recorded.events;
  std::size_t i = 0;
  while (i < got.size() && i < want.size() && got[i] == want[i]) ++i;
  c.first_mismatch = i;
  if (i < got.size() && i < want.size()) {
    c.detail = "event " + std::to_string(i) + ": recorded '" + format_event(want[i]) + "', replayed '" +
               format_event(got[i]) + "'";
  } else if (got.size() != want.size()) {
    c.detail = "recorded " + std::to_string(want.size()) + " events, replayed " + std::to_string(got.size());
  } else if (st.tick != recorded.ticks || st.status != recorded.status) {
    c.detail = "replay ended at tick " + std::to_string(st.tick) + " status " + std::string(to_string(st.status));
  } else {
    c.identical = true;
  }
  return c;
}

}  // namespace kum::sim

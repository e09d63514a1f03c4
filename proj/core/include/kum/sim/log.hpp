#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "kum/sim/state.hpp"

namespace kum::sim {

// Line-delimited event log:
//
//   # kum-sim event log v1
//   config <compact scenario JSON, interventions included>
//   tick=<n> op=<OP> args=<id:label,...> [flake=<id> | vein=<id> | at=<x>,<y> | mode=<m> | data=<json>]
//   end ticks=<n> status=<Running|Sclerotium|Fructify>
struct EventLog {
  Scenario config;
  std::vector<SimEvent> events;
  std::uint64_t ticks = 0;
  HaltStatus status = HaltStatus::Running;
};

std::string format_event(const SimEvent& e);
std::optional<SimEvent> parse_event(std::string_view line, std::string* error = nullptr);

EventLog make_log(const SimState& state);
void write_log(std::ostream& out, const EventLog& log);
std::string log_text(const EventLog& log);
// Throws Error(ParseError) with a line number, Error(ConfigError) for a bad config line.
EventLog parse_log(std::string_view text);

// Re-runs the config for the recorded number of ticks.
SimState replay(const EventLog& log);

struct ReplayCheck {
  bool identical = false;
  std::size_t first_mismatch = 0;  // index into the event list, meaningful when !identical
  std::string detail;
};

ReplayCheck check_replay(const EventLog& recorded);

std::optional<HaltStatus> halt_status_from_string(std::string_view s) noexcept;

}  // namespace kum::sim

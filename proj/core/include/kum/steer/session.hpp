#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "kum/sim/state.hpp"

namespace kum::steer {

using ClientId = std::uint64_t;

struct Outgoing {
  ClientId client = 0;
  nlohmann::json message;
};

enum class Pace : std::uint8_t { Paused, Running };

struct Session {
  std::string id;
  sim::SimState state;
  std::vector<sim::Intervention> interventions;  // append-only, in arrival order
  std::set<ClientId> subscribers;
  Pace pace = Pace::Paused;
  double ticks_per_second = 10;
  double budget = 0;                  // fractional ticks owed by the pacer
  nlohmann::json broadcast;           // snapshot the subscribers currently mirror
  std::size_t events_sent = 0;        // prefix of state.events already broadcast
};

// Message handling for all sessions, independent of any transport. Requests
// and replies are JSON objects with a `type` field:
//
//   create{scenario}            -> created{session, tick, status}
//   start{session, tps?}        -> started{session, tps}
//   pause{session}              -> paused{session, tick}
//   step{session, n?}           -> stepped{session, tick, status}
//   intervene{session, intervention} -> intervened{session, tick}
//   snapshot{session}           -> snapshot{session, snapshot}
//   subscribe{session}          -> subscribed{session, snapshot}
//   export_log{session}         -> log{session, text}
//
// Failures reply error{code, message} with code UnknownSession, BadMessage,
// HaltedError or ConfigError. Subscribers receive
// delta{session, delta, events, ops} after every change; applying the deltas
// in order to the subscribed snapshot reproduces snapshot{} exactly.
class SessionRegistry {
 public:
  std::vector<Outgoing> handle(ClientId from, const nlohmann::json& msg);
  // Advances running sessions by their pace over `seconds` of wall time.
  std::vector<Outgoing> pump(double seconds);
  // Drops a client's subscriptions.
  void disconnect(ClientId client);

  const Session* find(const std::string& id) const;
  std::size_t size() const noexcept { return sessions_.size(); }

 private:
  Session& get(const nlohmann::json& msg);
  void flush(Session& s, std::vector<Outgoing>& out);

  std::map<std::string, Session> sessions_;
  std::uint64_t next_id_ = 1;
};

nlohmann::json error_message(const std::string& code, const std::string& message);

}  // namespace kum::steer

#include "kum/steer/session.hpp"

#include <cmath>

#include "kum/core/error.hpp"
#include "kum/sim/log.hpp"
#include "kum/sim/sim.hpp"
#include "kum/sim/snapshot.hpp"

namespace kum::steer {

using nlohmann::json;

namespace {

constexpr std::uint64_t kMaxStep = 100000;

[[noreturn]] void bad(const std::string& msg) { throw Error(ErrorCode::BadMessage, msg); }

std::string session_id(const json& msg) {
  if (!msg.contains("session") || !msg.at("session").is_string()) bad("missing string field 'session'");
  return msg.at("session").get<std::string>();
}

}  // namespace

json error_message(const std::string& code, const std::string& message) {
  return {{"type", "error"}, {"code", code}, {"message", message}};
}

const Session* SessionRegistry::find(const std::string& id) const {
  auto it = sessions_.find(id);
  return it == sessions_.end() ? nullptr : &it->second;
}

Session& SessionRegistry::get(const json& msg) {
  const auto id = session_id(msg);
  auto it = sessions_.find(id);
  if (it == sessions_.end()) throw Error(ErrorCode::UnknownSession, "no session '" + id + "'");
  return it->second;
}

void SessionRegistry::flush(Session& s, std::vector<Outgoing>& out) {
  if (s.subscribers.empty()) {
    s.events_sent = s.state.events.size();
    return;
  }
  json cur = sim::snapshot(s.state);
  json events = json::array();
  json ops = json::array();
  for (std::size_t i = s.events_sent; i < s.state.events.size(); ++i) {
    const auto& e = s.state.events[i];
    events.push_back(sim::format_event(e));
    for (const auto& op : sim::event_ops(e)) ops.push_back(format_op(op));
  }
  s.events_sent = s.state.events.size();
  json msg = {{"type", "delta"},
              {"session", s.id},
              {"delta", sim::diff_snapshots(s.broadcast, cur)},
              {"events", std::move(events)},
              {"ops", std::move(ops)}};
  s.broadcast = std::move(cur);
  for (ClientId c : s.subscribers) out.push_back({c, msg});
}

std::vector<Outgoing> SessionRegistry::handle(ClientId from, const json& msg) {
  std::vector<Outgoing> out;
  const auto reply = [&](json j) { out.push_back({from, std::move(j)}); };
  try {
    if (!msg.is_object() || !msg.contains("type") || !msg.at("type").is_string())
      bad("expected an object with a string 'type'");
    const auto type = msg.at("type").get<std::string>();
    if (type == "create") {
      if (!msg.contains("scenario")) bad("create needs 'scenario'");
      Session s;
      s.state = sim::init_scenario(sim::scenario_from_json(msg.at("scenario")));
      s.id = "s" + std::to_string(next_id_++);
      s.broadcast = sim::snapshot(s.state);
      const auto id = s.id;
      auto& ref = sessions_.emplace(id, std::move(s)).first->second;
      reply({{"type", "created"},
             {"session", id},
             {"tick", ref.state.tick},
             {"status", std::string(sim::to_string(ref.state.status))}});
    } else if (type == "start") {
      Session& s = get(msg);
      if (msg.contains("tps")) {
        if (!msg.at("tps").is_number() || !(msg.at("tps").get<double>() > 0)) bad("'tps' must be a positive number");
        s.ticks_per_second = msg.at("tps").get<double>();
      }
      s.pace = Pace::Running;
      reply({{"type", "started"}, {"session", s.id}, {"tps", s.ticks_per_second}});
    } else if (type == "pause") {
      Session& s = get(msg);
      s.pace = Pace::Paused;
      s.budget = 0;
      reply({{"type", "paused"}, {"session", s.id}, {"tick", s.state.tick}});
    } else if (type == "step") {
      Session& s = get(msg);
      std::uint64_t n = 1;
      if (msg.contains("n")) {
        if (!msg.at("n").is_number_integer() || msg.at("n").get<long long>() < 0)
          bad("'n' must be a non-negative integer");
        n = msg.at("n").get<std::uint64_t>();
        if (n > kMaxStep) bad("'n' exceeds " + std::to_string(kMaxStep));
      }
      if (!s.state.running()) throw Error(ErrorCode::HaltedError, "session has halted");
      for (std::uint64_t i = 0; i < n && s.state.running(); ++i) sim::sim_step(s.state);
      flush(s, out);
      reply({{"type", "stepped"},
             {"session", s.id},
             {"tick", s.state.tick},
             {"status", std::string(sim::to_string(s.state.status))}});
    } else if (type == "intervene") {
      Session& s = get(msg);
      if (!msg.contains("intervention")) bad("intervene needs 'intervention'");
      json body = msg.at("intervention");
      if (body.is_object()) body.erase("tick");
      const sim::Intervention iv = sim::intervention_from_json(body);
      sim::apply_intervention(s.state, iv.what);
      s.interventions.push_back({s.state.tick, iv.what});
      flush(s, out);
      reply({{"type", "intervened"}, {"session", s.id}, {"tick", s.state.tick}});
    } else if (type == "snapshot") {
      Session& s = get(msg);
      reply({{"type", "snapshot"}, {"session", s.id}, {"snapshot", sim::snapshot(s.state)}});
    } else if (type == "subscribe") {
      Session& s = get(msg);
      flush(s, out);
      s.subscribers.insert(from);
      reply({{"type", "subscribed"}, {"session", s.id}, {"snapshot", s.broadcast}});
    } else if (type == "export_log") {
      Session& s = get(msg);
      reply({{"type", "log"}, {"session", s.id}, {"text", sim::log_text(sim::make_log(s.state))}});
    } else {
      bad("unknown message type '" + type + "'");
    }
  } catch (const Error& e) {
    std::string code(to_string(e.code()));
    reply(error_message(code, e.what()));
  } catch (const json::exception& e) {
    reply(error_message("BadMessage", e.what()));
  }
  return out;
}

std::vector<Outgoing> SessionRegistry::pump(double seconds) {
  std::vector<Outgoing> out;
  for (auto& [id, s] : sessions_) {
    if (s.pace != Pace::Running || !s.state.running()) continue;
    s.budget += seconds * s.ticks_per_second;
    const auto n = static_cast<std::uint64_t>(std::floor(s.budget));
    if (n == 0) continue;
    s.budget -= static_cast<double>(n);
    for (std::uint64_t i = 0; i < n && s.state.running(); ++i) sim::sim_step(s.state);
    flush(s, out);
  }
  return out;
}

void SessionRegistry::disconnect(ClientId client) {
  for (auto& [id, s] : sessions_) s.subscribers.erase(client);
}

}  // namespace kum::steer

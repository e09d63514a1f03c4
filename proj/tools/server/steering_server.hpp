#pragma once

#include <memory>
#include <string>

namespace kum::steer {

namespace detail {
struct ServerState;
}

// WebSocket endpoint `/session` carrying SessionRegistry messages, and
// GET /healthz answering 200. Everything runs on the thread calling run().
class SteeringServer {
 public:
  // Port 0 binds an ephemeral port; see port().
  SteeringServer(const std::string& address, unsigned short port, double pump_interval_s = 0.05);
  ~SteeringServer();
  SteeringServer(const SteeringServer&) = delete;
  SteeringServer& operator=(const SteeringServer&) = delete;

  unsigned short port() const;
  void run();
  // Safe from any thread.
  void stop();

 private:
  std::shared_ptr<detail::ServerState> impl_;
};

}  // namespace kum::steer

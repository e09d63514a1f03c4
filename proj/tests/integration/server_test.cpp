#include <gtest/gtest.h>

#include <thread>

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>
#include <nlohmann/json.hpp>

#include "kum/sim/log.hpp"
#include "kum/sim/snapshot.hpp"
#include "steering_server.hpp"

namespace asio = boost::asio;
namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
using tcp = asio::ip::tcp;
using nlohmann::json;

namespace {

class ServerFixture : public ::testing::Test {
 protected:
  void SetUp() override {
    server_ = std::make_unique<kum::steer::SteeringServer>("127.0.0.1", 0, 0.01);
    port_ = server_->port();
    thread_ = std::thread([this] { server_->run(); });
  }
  void TearDown() override {
    server_->stop();
    thread_.join();
  }

  http::response<http::string_body> get(const std::string& target) {
    asio::io_context ioc;
    beast::tcp_stream stream(ioc);
    stream.connect(tcp::endpoint(asio::ip::make_address("127.0.0.1"), port_));
    http::request<http::empty_body> req{http::verb::get, target, 11};
    req.set(http::field::host, "localhost");
    http::write(stream, req);
    beast::flat_buffer buf;
    http::response<http::string_body> res;
    http::read(stream, buf, res);
    return res;
  }

  std::unique_ptr<kum::steer::SteeringServer> server_;
  unsigned short port_ = 0;
  std::thread thread_;
};

// Headless mirror: keeps a snapshot current by applying every delta it sees.
class Client {
 public:
  explicit Client(unsigned short port) : ws_(ioc_) {
    ws_.next_layer().connect(tcp::endpoint(asio::ip::make_address("127.0.0.1"), port));
    ws_.handshake("localhost", "/session");
  }

  // Sends `msg` and returns the first non-delta reply.
  json request(const json& msg) {
    ws_.write(asio::buffer(msg.dump()));
    for (;;) {
      json m = receive();
      if (m.at("type") != "delta") return m;
    }
  }

  json receive() {
    beast::flat_buffer buf;
    ws_.read(buf);
    json m = json::parse(beast::buffers_to_string(buf.data()));
    if (m.at("type") == "delta") {
      kum::sim::apply_delta(mirror, m.at("delta"));
      ++deltas;
    }
    return m;
  }

  void close() { ws_.close(websocket::close_code::normal); }

  json mirror;
  std::size_t deltas = 0;

 private:
  asio::io_context ioc_;
  websocket::stream<tcp::socket> ws_;
};

json scenario() {
  return {{"arena", {{"width", 80}, {"height", 80}}},
          {"seed", 11},
          {"start", {{"x", 40}, {"y", 40}}},
          {"flakes",
           {{{"x", 15}, {"y", 20}, {"color", "Green"}, {"mass", 30}},
            {{"x", 65}, {"y", 25}, {"mass", 30}},
            {{"x", 40}, {"y", 70}, {"color", "Red"}, {"mass", 30}}}}};
}

}  // namespace

TEST_F(ServerFixture, HealthzAnswers200) {
  const auto res = get("/healthz");
  EXPECT_EQ(res.result(), http::status::ok);
  EXPECT_EQ(res.body(), "ok\n");
  EXPECT_EQ(get("/elsewhere").result(), http::status::not_found);
}

TEST_F(ServerFixture, MirrorMatchesAfterScriptedSession) {
  Client c(port_);
  const auto created = c.request({{"type", "create"}, {"scenario", scenario()}});
  ASSERT_EQ(created.at("type"), "created");
  const auto id = created.at("session").get<std::string>();
  const auto sub = c.request({{"type", "subscribe"}, {"session", id}});
  ASSERT_EQ(sub.at("type"), "subscribed");
  c.mirror = sub.at("snapshot");

  const json interventions[] = {
      {{"type", "PlaceFlake"}, {"x", 60}, {"y", 60}, {"color", "Blue"}},
      {{"type", "PlaceLight"}, {"x0", 0}, {"y0", 0}, {"x1", 25}, {"y1", 79}, {"intensity", 0.4}},
      {{"type", "PlaceFlake"}, {"x", 20}, {"y", 60}, {"color", "Yellow"}},
      {{"type", "RemoveLight"}},
      {{"type", "PlaceFlake"}, {"x", 70}, {"y", 10}},
  };
  for (const auto& iv : interventions) {
    EXPECT_EQ(c.request({{"type", "step"}, {"session", id}, {"n", 100}}).at("type"), "stepped");
    EXPECT_EQ(c.request({{"type", "intervene"}, {"session", id}, {"intervention", iv}}).at("type"), "intervened");
  }
  const auto snap = c.request({{"type", "snapshot"}, {"session", id}});
  EXPECT_EQ(snap.at("snapshot").at("tick"), 500);
  EXPECT_EQ(c.mirror, snap.at("snapshot"));
  EXPECT_EQ(c.deltas, 10u);

  const auto log = c.request({{"type", "export_log"}, {"session", id}});
  const auto parsed = kum::sim::parse_log(log.at("text").get<std::string>());
  EXPECT_EQ(parsed.config.interventions.size(), 5u);
  const auto check = kum::sim::check_replay(parsed);
  EXPECT_TRUE(check.identical) << check.detail;
  c.close();
}

TEST_F(ServerFixture, PacedRunStreamsDeltas) {
  Client c(port_);
  const auto id = c.request({{"type", "create"}, {"scenario", scenario()}}).at("session").get<std::string>();
  c.mirror = c.request({{"type", "subscribe"}, {"session", id}}).at("snapshot");
  c.request({{"type", "start"}, {"session", id}, {"tps", 2000}});
  while (c.deltas < 5) c.receive();
  EXPECT_EQ(c.request({{"type", "pause"}, {"session", id}}).at("type"), "paused");
  const auto snap = c.request({{"type", "snapshot"}, {"session", id}});
  EXPECT_GT(snap.at("snapshot").at("tick").get<int>(), 0);
  EXPECT_EQ(c.mirror, snap.at("snapshot"));
}

TEST_F(ServerFixture, ErrorsAndSeparateClients) {
  Client a(port_);
  Client b(port_);
  EXPECT_EQ(a.request({{"type", "step"}, {"session", "s99"}}).at("code"), "UnknownSession");
  EXPECT_EQ(a.request(json::parse("\"not an object\"")).at("code"), "BadMessage");
  const auto id = a.request({{"type", "create"}, {"scenario", scenario()}}).at("session").get<std::string>();
  // b sees sessions by id but receives no deltas without subscribing.
  EXPECT_EQ(b.request({{"type", "step"}, {"session", id}, {"n", 10}}).at("tick"), 10);
  EXPECT_EQ(a.request({{"type", "snapshot"}, {"session", id}}).at("snapshot").at("tick"), 10);
  EXPECT_EQ(a.deltas + b.deltas, 0u);
}

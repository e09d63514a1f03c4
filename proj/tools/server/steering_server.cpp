#include "steering_server.hpp"

#include <chrono>
#include <deque>
#include <iostream>
#include <map>

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>

#include "kum/steer/session.hpp"

namespace kum::steer {

namespace asio = boost::asio;
namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
using tcp = asio::ip::tcp;

class WsConnection;

namespace detail {

struct ServerState : std::enable_shared_from_this<ServerState> {
  asio::io_context ioc{1};
  tcp::acceptor acceptor{ioc};
  asio::steady_timer timer{ioc};
  std::chrono::duration<double> interval;
  std::chrono::steady_clock::time_point last;
  SessionRegistry registry;
  std::map<ClientId, std::weak_ptr<WsConnection>> clients;
  ClientId next_client = 1;

  void accept();
  void tick();
  void dispatch(std::vector<Outgoing> out);
};

}  // namespace detail

using detail::ServerState;

class WsConnection : public std::enable_shared_from_this<WsConnection> {
 public:
  WsConnection(tcp::socket socket, std::shared_ptr<ServerState> server, ClientId id)
      : ws_(std::move(socket)), server_(std::move(server)), id_(id) {}

  void start(http::request<http::string_body> req) {
    ws_.set_option(websocket::stream_base::timeout::suggested(beast::role_type::server));
    ws_.async_accept(req, [self = shared_from_this()](beast::error_code ec) {
      if (ec) return self->close();
      self->server_->clients[self->id_] = self;
      self->read();
    });
  }

  void send(std::string text) {
    queue_.push_back(std::move(text));
    if (queue_.size() == 1) write();
  }

 private:
  void read() {
    ws_.async_read(buffer_, [self = shared_from_this()](beast::error_code ec, std::size_t) {
      if (ec) return self->close();
      const std::string text = beast::buffers_to_string(self->buffer_.data());
      self->buffer_.consume(self->buffer_.size());
      nlohmann::json msg;
      try {
        msg = nlohmann::json::parse(text);
      } catch (const nlohmann::json::exception& e) {
        self->send(error_message("BadMessage", e.what()).dump());
        return self->read();
      }
      self->server_->dispatch(self->server_->registry.handle(self->id_, msg));
      self->read();
    });
  }

  void write() {
    ws_.text(true);
    ws_.async_write(asio::buffer(queue_.front()), [self = shared_from_this()](beast::error_code ec, std::size_t) {
      if (ec) return self->close();
      self->queue_.pop_front();
      if (!self->queue_.empty()) self->write();
    });
  }

  void close() {
    server_->registry.disconnect(id_);
    server_->clients.erase(id_);
  }

  websocket::stream<beast::tcp_stream> ws_;
  std::shared_ptr<ServerState> server_;
  ClientId id_;
  beast::flat_buffer buffer_;
  std::deque<std::string> queue_;
};

class HttpConnection : public std::enable_shared_from_this<HttpConnection> {
 public:
  HttpConnection(tcp::socket socket, std::shared_ptr<ServerState> server)
      : stream_(std::move(socket)), server_(std::move(server)) {}

  void start() {
    stream_.expires_after(std::chrono::seconds(30));
    http::async_read(stream_, buffer_, req_, [self = shared_from_this()](beast::error_code ec, std::size_t) {
      if (ec) return;
      self->route();
    });
  }

 private:
  void route() {
    if (websocket::is_upgrade(req_)) {
      if (req_.target() == "/session") {
        stream_.expires_never();
        auto ws = std::make_shared<WsConnection>(stream_.release_socket(), server_, server_->next_client++);
        ws->start(std::move(req_));
        return;
      }
      return respond(http::status::not_found, "unknown endpoint\n");
    }
    if (req_.target() == "/healthz" && (req_.method() == http::verb::get || req_.method() == http::verb::head))
      return respond(http::status::ok, "ok\n");
    respond(http::status::not_found, "not found\n");
  }

  void respond(http::status status, std::string body) {
    res_.result(status);
    res_.version(req_.version());
    res_.set(http::field::content_type, "text/plain");
    res_.keep_alive(false);
    res_.body() = std::move(body);
    res_.prepare_payload();
    http::async_write(stream_, res_, [self = shared_from_this()](beast::error_code, std::size_t) {
      beast::error_code ignored;
      self->stream_.socket().shutdown(tcp::socket::shutdown_send, ignored);
    });
  }

  beast::tcp_stream stream_;
  std::shared_ptr<ServerState> server_;
  beast::flat_buffer buffer_;
  http::request<http::string_body> req_;
  http::response<http::string_body> res_;
};

void detail::ServerState::accept() {
  acceptor.async_accept([self = shared_from_this()](beast::error_code ec, tcp::socket socket) {
    if (ec == asio::error::operation_aborted) return;
    if (!ec) std::make_shared<HttpConnection>(std::move(socket), self)->start();
    self->accept();
  });
}

void detail::ServerState::tick() {
  timer.expires_after(std::chrono::duration_cast<std::chrono::steady_clock::duration>(interval));
  timer.async_wait([self = shared_from_this()](beast::error_code ec) {
    if (ec) return;
    const auto now = std::chrono::steady_clock::now();
    const double dt = std::chrono::duration<double>(now - self->last).count();
    self->last = now;
    self->dispatch(self->registry.pump(dt));
    self->tick();
  });
}

void detail::ServerState::dispatch(std::vector<Outgoing> out) {
  for (auto& o : out) {
    auto it = clients.find(o.client);
    if (it == clients.end()) continue;
    if (auto c = it->second.lock()) c->send(o.message.dump());
  }
}

SteeringServer::SteeringServer(const std::string& address, unsigned short port, double pump_interval_s)
    : impl_(std::make_shared<ServerState>()) {
  impl_->interval = std::chrono::duration<double>(pump_interval_s);
  const tcp::endpoint ep{asio::ip::make_address(address), port};
  impl_->acceptor.open(ep.protocol());
  impl_->acceptor.set_option(asio::socket_base::reuse_address(true));
  impl_->acceptor.bind(ep);
  impl_->acceptor.listen(asio::socket_base::max_listen_connections);
}

SteeringServer::~SteeringServer() { stop(); }

unsigned short SteeringServer::port() const { return impl_->acceptor.local_endpoint().port(); }

void SteeringServer::run() {
  impl_->last = std::chrono::steady_clock::now();
  impl_->accept();
  impl_->tick();
  impl_->ioc.run();
}

void SteeringServer::stop() {
  asio::post(impl_->ioc, [impl = impl_] {
    beast::error_code ignored;
    impl->acceptor.close(ignored);
    impl->timer.cancel();
    impl->ioc.stop();
  });
}

}  // namespace kum::steer

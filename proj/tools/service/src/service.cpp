#include "glovespot/service.hpp"

#include <chrono>
#include <cstdlib>
#include <deque>
#include <thread>
#include <vector>

#include <boost/asio/dispatch.hpp>
#include <boost/asio/io_context.hpp>
#include <boost/asio/ip/tcp.hpp>
#include <boost/asio/post.hpp>
#include <boost/asio/strand.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>

#include "glovespot/error.hpp"
#include "glovespot/session.hpp"

namespace glovespot::service {

namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
namespace net = boost::asio;
using tcp = net::ip::tcp;
using nlohmann::json;

namespace {

// Reads stop once this many messages wait; TCP flow control does the rest.
constexpr std::size_t kInboxLimit = 4096;

class WsSession : public std::enable_shared_from_this<WsSession> {
 public:
  WsSession(tcp::socket&& socket, std::shared_ptr<const CascadeModel> cascade)
      : ws_(std::move(socket)), session_(std::move(cascade)) {}

  void run(http::request<http::string_body> req) {
    ws_.set_option(websocket::stream_base::timeout::suggested(beast::role_type::server));
    ws_.text(true);
    ws_.async_accept(req, beast::bind_front_handler(&WsSession::on_accept, shared_from_this()));
  }

 private:
  void on_accept(beast::error_code ec) {
    if (ec) return;
    do_read();
  }

  void do_read() {
    reading_ = true;
    ws_.async_read(buffer_, beast::bind_front_handler(&WsSession::on_read, shared_from_this()));
  }

  void on_read(beast::error_code ec, std::size_t) {
    reading_ = false;
    if (ec) {
      closed_ = true;
      return;
    }
    inbox_.push_back(beast::buffers_to_string(buffer_.data()));
    buffer_.consume(buffer_.size());
    if (!processing_) {
      processing_ = true;
      net::post(ws_.get_executor(), beast::bind_front_handler(&WsSession::process_one, shared_from_this()));
    }
    if (inbox_.size() < kInboxLimit) do_read();
  }

  // One message per handler invocation so reads can interleave and the
  // backlog is visible in queue_depth.
  void process_one() {
    if (inbox_.empty() || closed_) {
      processing_ = false;
      return;
    }
    const std::string text = std::move(inbox_.front());
    inbox_.pop_front();
    json reply = session_.handle(text, static_cast<int>(inbox_.size()));
    outbox_.push_back(reply.dump());
    if (!writing_) do_write();
    if (!reading_ && !closed_ && inbox_.size() < kInboxLimit) do_read();
    if (inbox_.empty()) {
      processing_ = false;
    } else {
      net::post(ws_.get_executor(), beast::bind_front_handler(&WsSession::process_one, shared_from_this()));
    }
  }

  void do_write() {
    writing_ = true;
    ws_.async_write(net::buffer(outbox_.front()),
                    beast::bind_front_handler(&WsSession::on_write, shared_from_this()));
  }

  void on_write(beast::error_code ec, std::size_t) {
    writing_ = false;
    if (ec) {
      closed_ = true;
      return;
    }
    outbox_.pop_front();
    if (!outbox_.empty()) do_write();
  }

  websocket::stream<beast::tcp_stream> ws_;
  beast::flat_buffer buffer_;
  Session session_;
  std::deque<std::string> inbox_;
  std::deque<std::string> outbox_;
  bool reading_ = false;
  bool processing_ = false;
  bool writing_ = false;
  bool closed_ = false;
};

http::response<http::string_body> json_response(const http::request<http::string_body>& req, http::status status,
                                                const json& body) {
  http::response<http::string_body> res{status, req.version()};
  res.set(http::field::content_type, "application/json");
  res.set(http::field::access_control_allow_origin, "*");
  res.keep_alive(req.keep_alive());
  res.body() = body.dump();
  res.prepare_payload();
  return res;
}

http::response<http::string_body> route(const http::request<http::string_body>& req, const ServiceModel& model) {
  if (req.method() != http::verb::get) {
    return json_response(req, http::status::method_not_allowed, {{"error", "only GET is supported"}});
  }
  const std::string_view target(req.target().data(), req.target().size());
  if (target == "/health") return json_response(req, http::status::ok, {{"status", "ok"}});
  if (target == "/model") return json_response(req, http::status::ok, model.info);
  if (target == "/templates") return json_response(req, http::status::ok, model.templates);
  return json_response(req, http::status::not_found, {{"error", "no such endpoint"}});
}

class HttpSession : public std::enable_shared_from_this<HttpSession> {
 public:
  HttpSession(tcp::socket&& socket, std::shared_ptr<const ServiceModel> model)
      : stream_(std::move(socket)), model_(std::move(model)) {}

  void run() {
    net::dispatch(stream_.get_executor(), beast::bind_front_handler(&HttpSession::do_read, shared_from_this()));
  }

 private:
  void do_read() {
    req_ = {};
    stream_.expires_after(std::chrono::seconds(30));
    http::async_read(stream_, buffer_, req_, beast::bind_front_handler(&HttpSession::on_read, shared_from_this()));
  }

  void on_read(beast::error_code ec, std::size_t) {
    if (ec == http::error::end_of_stream) {
      stream_.socket().shutdown(tcp::socket::shutdown_send, ec);
      return;
    }
    if (ec) return;
    if (websocket::is_upgrade(req_)) {
      if (req_.target() == "/session") {
        stream_.expires_never();
        std::make_shared<WsSession>(stream_.release_socket(), model_->cascade)->run(std::move(req_));
        return;
      }
      send(json_response(req_, http::status::not_found, {{"error", "the message channel lives at /session"}}));
      return;
    }
    send(route(req_, *model_));
  }

  void send(http::response<http::string_body> res) {
    auto owned = std::make_shared<http::response<http::string_body>>(std::move(res));
    http::async_write(stream_, *owned, [self = shared_from_this(), owned](beast::error_code ec, std::size_t) {
      if (ec) return;
      if (owned->need_eof()) {
        self->stream_.socket().shutdown(tcp::socket::shutdown_send, ec);
        return;
      }
      self->do_read();
    });
  }

  beast::tcp_stream stream_;
  beast::flat_buffer buffer_;
  http::request<http::string_body> req_;
  std::shared_ptr<const ServiceModel> model_;
};

class Listener : public std::enable_shared_from_this<Listener> {
 public:
  Listener(net::io_context& ioc, const tcp::endpoint& endpoint, std::shared_ptr<const ServiceModel> model)
      : ioc_(ioc), acceptor_(net::make_strand(ioc)), model_(std::move(model)) {
    beast::error_code ec;
    acceptor_.open(endpoint.protocol(), ec);
    if (!ec) acceptor_.set_option(net::socket_base::reuse_address(true), ec);
    if (!ec) acceptor_.bind(endpoint, ec);
    if (!ec) acceptor_.listen(net::socket_base::max_listen_connections, ec);
    if (ec) {
      throw Error("cannot listen on " + endpoint.address().to_string() + ":" + std::to_string(endpoint.port()) +
                  ": " + ec.message());
    }
  }

  unsigned short port() const { return acceptor_.local_endpoint().port(); }

  void start() { do_accept(); }

  void close() {
    net::post(acceptor_.get_executor(), [self = shared_from_this()] {
      beast::error_code ec;
      self->acceptor_.close(ec);
    });
  }

 private:
  void do_accept() {
    acceptor_.async_accept(net::make_strand(ioc_),
                           beast::bind_front_handler(&Listener::on_accept, shared_from_this()));
  }

  void on_accept(beast::error_code ec, tcp::socket socket) {
    if (!ec) std::make_shared<HttpSession>(std::move(socket), model_)->run();
    if (acceptor_.is_open()) do_accept();
  }

  net::io_context& ioc_;
  tcp::acceptor acceptor_;
  std::shared_ptr<const ServiceModel> model_;
};

}  // namespace

Endpoint parse_endpoint(std::string_view text) {
  const auto colon = text.rfind(':');
  if (colon == std::string_view::npos || colon == 0 || colon + 1 == text.size()) {
    throw InvalidInput("bind address must look like host:port, got \"" + std::string(text) + "\"");
  }
  Endpoint e;
  e.host = std::string(text.substr(0, colon));
  const std::string port(text.substr(colon + 1));
  char* end = nullptr;
  const long p = std::strtol(port.c_str(), &end, 10);
  if (*end != '\0' || p < 0 || p > 65535) throw InvalidInput("bad port \"" + port + "\"");
  e.port = static_cast<unsigned short>(p);
  return e;
}

Endpoint resolve_bind(const std::optional<std::string>& flag) {
  if (flag) return parse_endpoint(*flag);
  if (const char* env = std::getenv("GLOVESPOT_BIND"); env && *env) return parse_endpoint(env);
  return {};
}

json model_info(const CascadeModel& cascade) {
  json info{{"library_size", cascade.library_size()},
            {"non_gesture_classes", cascade.non_gesture_count()},
            {"lag", cascade.lag},
            {"threshold", cascade.threshold},
            {"debounce", cascade.debounce},
            {"edge_triggered_one_shots", cascade.edge_triggered_one_shots},
            {"comm_layers", cascade.comm.layer_sizes()},
            {"frame_period_ms", kFramePeriodMs}};
  info["non_gesture_layers"] = cascade.non_gesture ? json(cascade.non_gesture->layer_sizes()) : json(nullptr);
  return info;
}

struct Server::Impl {
  net::io_context ioc;
  std::shared_ptr<Listener> listener;
  std::vector<std::thread> threads;
  int thread_count = 1;
};

Server::Server(ServiceModel model, const Endpoint& bind, int threads) : impl_(std::make_unique<Impl>()) {
  if (!model.cascade) throw Error("no model loaded");
  model.cascade->validate();
  impl_->thread_count = std::max(threads, 1);
  beast::error_code ec;
  const auto address = net::ip::make_address(bind.host, ec);
  if (ec) throw InvalidInput("bad bind host \"" + bind.host + "\"");
  impl_->listener = std::make_shared<Listener>(impl_->ioc, tcp::endpoint{address, bind.port},
                                               std::make_shared<const ServiceModel>(std::move(model)));
  impl_->listener->start();
}

Server::~Server() { stop(); }

unsigned short Server::port() const { return impl_->listener->port(); }

void Server::start() {
  for (int i = 0; i < impl_->thread_count; ++i) impl_->threads.emplace_back([this] { impl_->ioc.run(); });
}

void Server::run() {
  for (int i = 1; i < impl_->thread_count; ++i) impl_->threads.emplace_back([this] { impl_->ioc.run(); });
  impl_->ioc.run();
}

void Server::stop() {
  if (!impl_) return;
  impl_->listener->close();
  impl_->ioc.stop();
  for (std::thread& t : impl_->threads) {
    if (t.joinable() && t.get_id() != std::this_thread::get_id()) t.join();
  }
  impl_->threads.clear();
}

}  // namespace glovespot::service

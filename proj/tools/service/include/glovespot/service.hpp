#pragma once

// HTTP + WebSocket front end for live spotting.
//   GET /health     {"status":"ok"}
//   GET /model      cascade metadata
//   GET /templates  pose presets for the console
//   WS  /session    frame/reset messages, one reply per message (see session.hpp)

#include <memory>
#include <optional>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "glovespot/spotter.hpp"

namespace glovespot::service {

struct Endpoint {
  std::string host = "127.0.0.1";
  unsigned short port = 8765;
};

/// "host:port". Throws InvalidInput.
Endpoint parse_endpoint(std::string_view text);

/// The flag wins, then GLOVESPOT_BIND, then 127.0.0.1:8765.
Endpoint resolve_bind(const std::optional<std::string>& flag);

struct ServiceModel {
  std::shared_ptr<const CascadeModel> cascade;
  nlohmann::json info = nlohmann::json::object();
  nlohmann::json templates = nlohmann::json::array();
};

/// Metadata served at /model.
nlohmann::json model_info(const CascadeModel& cascade);

class Server {
 public:
  /// Binds immediately; port 0 picks a free port. Throws Error when the
  /// address cannot be bound or the model is missing.
  Server(ServiceModel model, const Endpoint& bind, int threads = 1);
  ~Server();
  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  unsigned short port() const;

  /// Serves on background threads until stop().
  void start();
  /// Serves on the calling thread (plus threads - 1 helpers) until stop().
  void run();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace glovespot::service

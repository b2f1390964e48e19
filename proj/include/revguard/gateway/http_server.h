#pragma once

#include "revguard/gateway/gateway.h"

#include <json.hpp>

#include <memory>
#include <string>

namespace httplib {
class Server;
}

namespace revguard::gateway {

// {"ok": true, "data": ...}
nlohmann::json ok_envelope(nlohmann::json data);
// {"ok": false, "error": {"code", "stage", "message"}}; stage is null
// unless a pipeline stage failed.
nlohmann::json error_envelope(std::string_view code, std::string_view message,
                              const std::optional<std::string>& stage = std::nullopt);

struct HttpReply {
  int status = 200;
  nlohmann::json body;
};

// Maps the exception in flight to a status and error envelope:
// RequestError -> its status, ValidationError -> 400, StageError -> 502
// (504 when the cause was a timeout), anything else -> 500.
HttpReply reply_for_current_exception();

// HTTP front-end:
//   POST /v1/moderate  {text, context?, want_rewrite?}
//   POST /v1/classify  {text}
//   POST /v1/reframe   {text}
//   POST /v1/feedback  {comment_hash | text, action, note?}
//   GET  /healthz
// Bearer auth (when configured) guards /v1/*. CORS headers are sent only
// for configured origins.
class HttpServer {
 public:
  HttpServer(Gateway& gateway, const GatewayConfig& cfg);
  ~HttpServer();

  // Binds host:port (port 0 picks a free one). Returns false when the port
  // cannot be bound.
  bool bind();
  int port() const { return port_; }
  // Serves until stop() is called.
  void listen();
  void stop();
  void wait_until_ready() const;

  // Routes one request without a socket; used by the tests.
  HttpReply handle(const std::string& method, const std::string& path, const std::string& body,
                   const std::string& authorization = {});

 private:
  Gateway& gateway_;
  GatewayConfig cfg_;
  std::unique_ptr<httplib::Server> server_;
  int port_ = 0;
};

}  // namespace revguard::gateway

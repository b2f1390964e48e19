#include "revguard/gateway/http_server.h"

#include "revguard/core/json_io.h"

#include <httplib.h>

#include <algorithm>

namespace revguard::gateway {

using nlohmann::json;

namespace {

json parse_body(const std::string& body) {
  json j;
  try {
    j = json::parse(body);
  } catch (const json::parse_error&) {
    throw RequestError(400, "invalid_request", "request body is not valid JSON");
  }
  if (!j.is_object()) throw RequestError(400, "invalid_request", "request body must be a JSON object");
  return j;
}

std::string required_string(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || !it->is_string()) {
    throw RequestError(400, "invalid_request", std::string("field '") + key + "' must be a string");
  }
  return it->get<std::string>();
}

std::optional<std::string> optional_string(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  if (!it->is_string()) throw RequestError(400, "invalid_request", std::string("field '") + key + "' must be a string");
  return it->get<std::string>();
}

bool optional_bool(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return false;
  if (!it->is_boolean()) throw RequestError(400, "invalid_request", std::string("field '") + key + "' must be a boolean");
  return it->get<bool>();
}

}  // namespace

json ok_envelope(json data) { return json{{"ok", true}, {"data", std::move(data)}}; }

json error_envelope(std::string_view code, std::string_view message, const std::optional<std::string>& stage) {
  return json{{"ok", false},
              {"error", {{"code", code}, {"stage", stage ? json(*stage) : json(nullptr)}, {"message", message}}}};
}

HttpReply reply_for_current_exception() {
  try {
    throw;
  } catch (const RequestError& e) {
    return {e.status(), error_envelope(e.code(), e.what())};
  } catch (const StageError& e) {
    if (e.cause().is_timeout()) return {504, error_envelope("stage_timeout", e.what(), e.stage())};
    return {502, error_envelope("backend_error", e.what(), e.stage())};
  } catch (const ValidationError& e) {
    return {400, error_envelope("invalid_request", e.what())};
  } catch (const std::exception& e) {
    return {500, error_envelope("internal", e.what())};
  }
}

HttpServer::HttpServer(Gateway& gateway, const GatewayConfig& cfg)
    : gateway_(gateway), cfg_(cfg), server_(std::make_unique<httplib::Server>()) {
  // Room for max_text_length 4-byte characters plus JSON framing.
  server_->set_payload_max_length(cfg_.max_text_length * 4 + 64 * 1024);
  // httplib's default sets SO_REUSEPORT, which lets a second server bind a
  // port already in use. Plain SO_REUSEADDR keeps restarts quick.
  server_->set_socket_options([](socket_t sock) {
    int yes = 1;
    ::setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof(yes));
  });

  auto cors = [this](const httplib::Request& req, httplib::Response& res) {
    const std::string origin = req.get_header_value("Origin");
    if (origin.empty()) return true;
    const bool allowed = std::find(cfg_.allowed_origins.begin(), cfg_.allowed_origins.end(), origin) !=
                         cfg_.allowed_origins.end();
    if (allowed) {
      res.set_header("Access-Control-Allow-Origin", origin);
      res.set_header("Vary", "Origin");
      res.set_header("Access-Control-Allow-Headers", "Content-Type, Authorization");
      res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
    }
    return allowed;
  };

  auto route = [this, cors](const httplib::Request& req, httplib::Response& res) {
    cors(req, res);
    HttpReply reply = handle(req.method, req.path, req.body, req.get_header_value("Authorization"));
    res.status = reply.status;
    res.set_content(reply.body.dump(-1, ' ', false, json::error_handler_t::replace), "application/json");
  };
  for (const char* path : {"/v1/moderate", "/v1/classify", "/v1/reframe", "/v1/feedback"}) server_->Post(path, route);
  server_->Get("/healthz", route);
  server_->Options(R"(/.*)", [cors](const httplib::Request& req, httplib::Response& res) {
    res.status = cors(req, res) ? 204 : 403;
  });
  server_->set_error_handler([](const httplib::Request&, httplib::Response& res) {
    if (!res.body.empty()) return;
    const std::string code = res.status == 413 ? "too_large" : res.status == 404 ? "not_found" : "invalid_request";
    res.set_content(error_envelope(code, httplib::status_message(res.status)).dump(), "application/json");
  });
}

HttpServer::~HttpServer() { stop(); }

bool HttpServer::bind() {
  if (cfg_.port == 0) {
    port_ = server_->bind_to_any_port(cfg_.host);
    return port_ > 0;
  }
  if (!server_->bind_to_port(cfg_.host, cfg_.port)) return false;
  port_ = cfg_.port;
  return true;
}

void HttpServer::listen() { server_->listen_after_bind(); }

void HttpServer::stop() {
  if (server_) server_->stop();
  gateway_.event_log().flush();
}

void HttpServer::wait_until_ready() const { server_->wait_until_ready(); }

HttpReply HttpServer::handle(const std::string& method, const std::string& path, const std::string& body,
                             const std::string& authorization) {
  try {
    if (method == "GET" && path == "/healthz") return {200, ok_envelope(gateway_.health())};
    if (method != "POST") throw RequestError(405, "method_not_allowed", "use POST");
    if (cfg_.bearer_token && authorization != "Bearer " + *cfg_.bearer_token) {
      throw RequestError(401, "unauthorized", "missing or invalid bearer token");
    }
    const json req = parse_body(body);
    if (path == "/v1/moderate") {
      ModerateRequest m;
      m.text = required_string(req, "text");
      m.context = optional_string(req, "context");
      m.want_rewrite = optional_bool(req, "want_rewrite");
      return {200, ok_envelope(json(gateway_.moderate(m)))};
    }
    if (path == "/v1/classify") return {200, ok_envelope(json(gateway_.classify(required_string(req, "text"))))};
    if (path == "/v1/reframe") return {200, ok_envelope(json(gateway_.reframe(required_string(req, "text"))))};
    if (path == "/v1/feedback") {
      FeedbackRecord f;
      f.action = parse_feedback_action(required_string(req, "action"));
      if (auto hash = optional_string(req, "comment_hash")) {
        f.comment_hash = *hash;
      } else if (auto text = optional_string(req, "text")) {
        f.comment_hash = comment_hash(*text);
      }
      f.note = optional_string(req, "note");
      f.timestamp = optional_string(req, "timestamp").value_or("");
      gateway_.feedback(std::move(f));
      return {200, ok_envelope(json{{"recorded", true}})};
    }
    throw RequestError(404, "not_found", "no route for " + path);
  } catch (...) {
    return reply_for_current_exception();
  }
}

}  // namespace revguard::gateway

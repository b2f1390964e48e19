#include "revguard/backend/http_backend.h"

#include "revguard/core/errors.h"

#include <httplib.h>

#include <cstdlib>
#include <random>
#include <thread>

namespace revguard::backend {

using nlohmann::json;

namespace {

struct SplitUrl {
  std::string origin;  // scheme://host[:port]
  std::string path;
};

SplitUrl split_url(const std::string& url) {
  const std::size_t scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw BackendError(BackendErrorKind::kTransport, "malformed URL '" + url + "'");
  const std::size_t path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {url, "/"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

BackendError map_httplib_error(httplib::Error err, const std::string& url) {
  const std::string what = "request to " + url + " failed: " + httplib::to_string(err);
  switch (err) {
    case httplib::Error::ConnectionTimeout:
    case httplib::Error::Read:
      return BackendError(BackendErrorKind::kTimeout, what);
    default:
      return BackendError(BackendErrorKind::kTransport, what);
  }
}

httplib::Client make_client(const std::string& origin, int timeout_ms) {
  httplib::Client client(origin);
  const auto sec = timeout_ms / 1000;
  const auto usec = (timeout_ms % 1000) * 1000;
  client.set_connection_timeout(sec, usec);
  client.set_read_timeout(sec, usec);
  client.set_write_timeout(sec, usec);
  return client;
}

bool retryable(const BackendError& e) {
  switch (e.kind()) {
    case BackendErrorKind::kTimeout:
    case BackendErrorKind::kTransport:
      return true;
    case BackendErrorKind::kHttpStatus:
      return e.http_status() == 429 || e.http_status() >= 500;
    default:
      return false;
  }
}

double unit_random() {
  thread_local std::mt19937_64 rng{std::random_device{}()};
  return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

}  // namespace

HttpResponse HttplibTransport::post(const HttpRequest& request) {
  const SplitUrl parts = split_url(request.url);
  httplib::Client client = make_client(parts.origin, request.timeout_ms);
  httplib::Headers headers;
  for (const auto& [k, v] : request.headers) headers.emplace(k, v);
  auto result = client.Post(parts.path, headers, request.body, "application/json");
  if (!result) throw map_httplib_error(result.error(), request.url);
  return {result->status, result->body};
}

HttpResponse HttplibTransport::get(const std::string& url, int timeout_ms) {
  const SplitUrl parts = split_url(url);
  httplib::Client client = make_client(parts.origin, timeout_ms);
  auto result = client.Get(parts.path);
  if (!result) throw map_httplib_error(result.error(), url);
  return {result->status, result->body};
}

std::chrono::milliseconds RetryPolicy::delay_for(int retry_index, double unit) const {
  double base = static_cast<double>(initial_backoff.count());
  for (int i = 0; i < retry_index; ++i) base *= factor;
  base = std::min(base, static_cast<double>(max_backoff.count()));
  const double scale = 1.0 + jitter * (2.0 * unit - 1.0);
  return std::chrono::milliseconds(static_cast<std::int64_t>(base * scale));
}

json build_chat_request(const std::string& model, std::span<const ChatMessage> messages,
                        const DecodingParams& params) {
  json msgs = json::array();
  for (const ChatMessage& m : messages) msgs.push_back({{"role", to_string(m.role)}, {"content", m.content}});
  json body = {{"model", model},
               {"messages", std::move(msgs)},
               {"temperature", params.temperature},
               {"max_tokens", params.max_tokens}};
  if (!params.stop_sequences.empty()) body["stop"] = params.stop_sequences;
  return body;
}

std::string parse_chat_response(std::string_view body) {
  try {
    const json doc = json::parse(body);
    return doc.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const json::exception& e) {
    throw BackendError(BackendErrorKind::kProtocol, std::string("unexpected completion payload: ") + e.what());
  }
}

HttpChatBackend::HttpChatBackend(BackendConfig cfg, std::shared_ptr<Transport> transport, RetryPolicy policy,
                                 Sleeper sleeper)
    : cfg_(std::move(cfg)),
      transport_(std::move(transport)),
      policy_(policy),
      sleeper_(sleeper ? std::move(sleeper) : Sleeper([](auto d) { std::this_thread::sleep_for(d); })),
      gate_(cfg_.max_concurrent_requests) {
  validate(cfg_);
}

std::string HttpChatBackend::attempt_once(const HttpRequest& request) {
  AdmissionGate::Permit permit(gate_);
  const HttpResponse response = transport_->post(request);
  if (response.status < 200 || response.status >= 300) {
    std::string detail = response.body.substr(0, 512);
    throw BackendError(BackendErrorKind::kHttpStatus,
                       "backend '" + cfg_.backend_id + "' returned HTTP " + std::to_string(response.status) + ": " + detail,
                       response.status);
  }
  return parse_chat_response(response.body);
}

std::string HttpChatBackend::complete(std::span<const ChatMessage> messages, const DecodingParams& params) {
  validate(messages);
  HttpRequest request;
  request.url = cfg_.endpoint;
  request.body = build_chat_request(cfg_.model, messages, params).dump();
  request.timeout_ms = cfg_.timeout_ms;
  request.headers["Content-Type"] = "application/json";
  if (!cfg_.auth_token_env.empty()) {
    if (const char* token = std::getenv(cfg_.auth_token_env.c_str()); token && *token) {
      request.headers["Authorization"] = std::string("Bearer ") + token;
    }
  }

  for (int attempt = 0;; ++attempt) {
    try {
      return attempt_once(request);
    } catch (const BackendError& e) {
      if (!retryable(e)) throw;
      if (attempt >= cfg_.max_retries) {
        if (cfg_.max_retries == 0) throw;
        throw BackendError(BackendErrorKind::kRetryExhausted,
                           "backend '" + cfg_.backend_id + "' failed after " + std::to_string(attempt + 1) +
                               " attempts: " + e.what(),
                           e.http_status(), e.kind());
      }
      sleeper_(policy_.delay_for(attempt, unit_random()));
    }
  }
}

bool HttpChatBackend::probe() {
  try {
    transport_->get(split_url(cfg_.endpoint).origin + "/", std::min(cfg_.timeout_ms, 2000));
    return true;  // any HTTP answer means the host is reachable
  } catch (const BackendError&) {
    return false;
  }
}

}  // namespace revguard::backend

#pragma once

#include "revguard/backend/backend.h"

#include <json.hpp>

#include <chrono>
#include <functional>
#include <map>
#include <memory>

namespace revguard::backend {

struct HttpRequest {
  std::string url;
  std::map<std::string, std::string> headers;
  std::string body;
  int timeout_ms = 30000;
};

struct HttpResponse {
  int status = 0;
  std::string body;
};

// Moves bytes. Throws BackendError with kTimeout or kTransport when no HTTP
// response was received at all.
class Transport {
 public:
  virtual ~Transport() = default;
  virtual HttpResponse post(const HttpRequest& request) = 0;
  virtual HttpResponse get(const std::string& url, int timeout_ms) = 0;
};

// Transport over cpp-httplib. Supports http:// URLs (and https:// when
// httplib was built with OpenSSL support).
class HttplibTransport final : public Transport {
 public:
  HttpResponse post(const HttpRequest& request) override;
  HttpResponse get(const std::string& url, int timeout_ms) override;
};

struct RetryPolicy {
  std::chrono::milliseconds initial_backoff{250};
  double factor = 2.0;
  double jitter = 0.2;  // each delay is scaled by a uniform factor in [1-jitter, 1+jitter]
  std::chrono::milliseconds max_backoff{8000};

  std::chrono::milliseconds delay_for(int retry_index, double unit_random) const;
};

using Sleeper = std::function<void(std::chrono::milliseconds)>;

// Request/response body for the chat-completions wire protocol:
//   {"model", "messages": [{"role","content"}], "temperature", "max_tokens", "stop"?}
//   -> {"choices": [{"message": {"content": "..."}}]}
nlohmann::json build_chat_request(const std::string& model, std::span<const ChatMessage> messages,
                                  const DecodingParams& params);
std::string parse_chat_response(std::string_view body);

// Chat backend over HTTP with bounded retries and a per-backend admission
// cap. Retries timeouts, connection failures, 429 and 5xx; every other
// status fails immediately.
class HttpChatBackend final : public ChatBackend {
 public:
  HttpChatBackend(BackendConfig cfg, std::shared_ptr<Transport> transport, RetryPolicy policy = {},
                  Sleeper sleeper = {});

  const std::string& id() const override { return cfg_.backend_id; }
  std::string complete(std::span<const ChatMessage> messages, const DecodingParams& params) override;
  bool probe() override;

  const AdmissionGate& gate() const { return gate_; }

 private:
  std::string attempt_once(const HttpRequest& request);

  BackendConfig cfg_;
  std::shared_ptr<Transport> transport_;
  RetryPolicy policy_;
  Sleeper sleeper_;
  AdmissionGate gate_;
};

}  // namespace revguard::backend

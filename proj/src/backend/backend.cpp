#include "revguard/backend/backend.h"

#include "revguard/core/errors.h"
#include "revguard/core/text.h"

#include <algorithm>
#include <charconv>
#include <cctype>
#include <filesystem>

namespace revguard::backend {

std::string_view to_string(Role role) {
  switch (role) {
    case Role::kSystem: return "system";
    case Role::kUser: return "user";
    case Role::kAssistant: return "assistant";
  }
  return "user";
}

void validate(std::span<const ChatMessage> messages) {
  if (messages.empty()) throw ValidationError("message list is empty");
  for (const ChatMessage& m : messages) {
    if (m.role != Role::kAssistant && text::is_blank(m.content)) {
      throw ValidationError(std::string(to_string(m.role)) + " message has blank content");
    }
  }
}

void validate(const BackendConfig& cfg) {
  if (cfg.backend_id.empty()) throw ConfigError("backend_id is empty");
  const std::string where = "backend '" + cfg.backend_id + "': ";
  if (cfg.timeout_ms <= 0) throw ConfigError(where + "timeout_ms must be > 0");
  if (cfg.max_retries < 0) throw ConfigError(where + "max_retries must be >= 0");
  if (cfg.max_concurrent_requests < 1) throw ConfigError(where + "max_concurrent_requests must be >= 1");
  if (cfg.kind == BackendKind::kHttp && cfg.endpoint.empty()) throw ConfigError(where + "endpoint is empty");
  if (cfg.kind == BackendKind::kMock && !cfg.mock_file.empty() && !std::filesystem::exists(cfg.mock_file)) {
    throw ConfigError(where + "mock file '" + cfg.mock_file + "' not found");
  }
}

std::string prompt_hash(std::span<const ChatMessage> messages) {
  std::string canonical;
  for (const ChatMessage& m : messages) {
    canonical.append(to_string(m.role)).append(1, ':');
    canonical.append(std::to_string(m.content.size())).append(1, ':').append(m.content);
  }
  return text::sha256_hex(canonical);
}

AdmissionGate::AdmissionGate(int capacity) : capacity_(capacity) {
  if (capacity < 1) throw ConfigError("admission gate capacity must be >= 1");
}

void AdmissionGate::acquire() {
  std::unique_lock lock(mutex_);
  cv_.wait(lock, [&] { return in_flight_ < capacity_; });
  ++in_flight_;
  peak_ = std::max(peak_, in_flight_);
}

void AdmissionGate::release() {
  {
    std::lock_guard lock(mutex_);
    --in_flight_;
  }
  cv_.notify_one();
}

int AdmissionGate::in_flight() const {
  std::lock_guard lock(mutex_);
  return in_flight_;
}

int AdmissionGate::peak_in_flight() const {
  std::lock_guard lock(mutex_);
  return peak_;
}

CompletionScorer::CompletionScorer(std::shared_ptr<ChatBackend> chat) : chat_(std::move(chat)) {}

std::vector<ChatMessage> CompletionScorer::build_prompt(std::string_view text) {
  return {
      {Role::kSystem,
       "You are a toxicity classifier for code-review comments. Reply with a single number between 0 and 1: "
       "the probability that the comment is toxic (hostile, insulting, profane, or unprofessional)."},
      {Role::kUser, "<comment>\n" + std::string(text) + "\n</comment>"},
  };
}

double CompletionScorer::parse_score(std::string_view reply) {
  for (std::size_t i = 0; i < reply.size(); ++i) {
    if (!std::isdigit(static_cast<unsigned char>(reply[i])) && reply[i] != '.') continue;
    std::size_t end = i;
    while (end < reply.size() && (std::isdigit(static_cast<unsigned char>(reply[end])) || reply[end] == '.')) ++end;
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(reply.data() + i, reply.data() + end, value);
    if (ec == std::errc{} && ptr != reply.data() + i && value >= 0.0 && value <= 1.0) return value;
    break;
  }
  throw BackendError(BackendErrorKind::kProtocol, "classifier reply has no score in [0,1]: '" + std::string(reply) + "'");
}

double CompletionScorer::score(std::string_view text) {
  const auto messages = build_prompt(text);
  return parse_score(chat_->complete(messages, DecodingParams{}));
}

}  // namespace revguard::backend

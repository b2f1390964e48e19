#pragma once

#include <condition_variable>
#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace revguard::backend {

enum class Role { kSystem, kUser, kAssistant };

std::string_view to_string(Role role);

struct ChatMessage {
  Role role = Role::kUser;
  std::string content;

  bool operator==(const ChatMessage&) const = default;
};

// Throws ValidationError when a system/user message has blank content.
void validate(std::span<const ChatMessage> messages);

struct DecodingParams {
  double temperature = 0.0;
  int max_tokens = 1024;
  std::vector<std::string> stop_sequences;

  bool operator==(const DecodingParams&) const = default;
};

enum class BackendKind { kHttp, kMock };

struct BackendConfig {
  std::string backend_id;
  BackendKind kind = BackendKind::kHttp;
  std::string endpoint;        // full URL of the chat-completions route
  std::string model;
  std::string auth_token_env;  // name of the env var holding the bearer token
  int timeout_ms = 30000;
  int max_retries = 2;
  int max_concurrent_requests = 4;
  std::string mock_file;       // canned-response file for kMock
};

// Throws ConfigError on timeout_ms <= 0, max_retries < 0,
// max_concurrent_requests < 1, or a missing id/endpoint/mock file.
void validate(const BackendConfig& cfg);

// Stable hash of a message list. Keys the mock backend's canned responses.
std::string prompt_hash(std::span<const ChatMessage> messages);

// Caps the number of requests in flight against one backend.
class AdmissionGate {
 public:
  explicit AdmissionGate(int capacity);

  class Permit {
   public:
    explicit Permit(AdmissionGate& gate) : gate_(&gate) { gate_->acquire(); }
    Permit(const Permit&) = delete;
    Permit& operator=(const Permit&) = delete;
    ~Permit() { gate_->release(); }

   private:
    AdmissionGate* gate_;
  };

  void acquire();
  void release();

  int capacity() const { return capacity_; }
  int in_flight() const;
  int peak_in_flight() const;

 private:
  const int capacity_;
  mutable std::mutex mutex_;
  std::condition_variable cv_;
  int in_flight_ = 0;
  int peak_ = 0;
};

// A text-completion backend. Implementations are safe to share across
// threads.
class ChatBackend {
 public:
  virtual ~ChatBackend() = default;

  virtual const std::string& id() const = 0;

  // Returns the text of the first completion choice. Throws BackendError.
  virtual std::string complete(std::span<const ChatMessage> messages, const DecodingParams& params) = 0;

  // Cheap reachability check used by health reporting.
  virtual bool probe() { return true; }
};

// Produces a toxicity score in [0,1] for a text.
class ScoringBackend {
 public:
  virtual ~ScoringBackend() = default;
  virtual const std::string& id() const = 0;
  virtual double score(std::string_view text) = 0;
  virtual bool probe() { return true; }
};

// Scores text by asking a chat backend for a probability. The reply must
// contain a number in [0,1]; anything else is a kProtocol BackendError.
class CompletionScorer final : public ScoringBackend {
 public:
  explicit CompletionScorer(std::shared_ptr<ChatBackend> chat);

  const std::string& id() const override { return chat_->id(); }
  double score(std::string_view text) override;
  bool probe() override { return chat_->probe(); }

  static std::vector<ChatMessage> build_prompt(std::string_view text);
  static double parse_score(std::string_view reply);

 private:
  std::shared_ptr<ChatBackend> chat_;
};

}  // namespace revguard::backend

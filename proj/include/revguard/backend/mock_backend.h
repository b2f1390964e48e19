#pragma once

#include "revguard/backend/backend.h"
#include "revguard/core/errors.h"

#include <atomic>
#include <chrono>
#include <map>
#include <mutex>

namespace revguard::backend {

// One scripted reply: either text or a simulated failure.
struct MockReply {
  std::string text;
  std::optional<BackendErrorKind> failure;
  int http_status = 0;

  static MockReply ok(std::string text) { return {std::move(text), std::nullopt, 0}; }
  static MockReply fail(BackendErrorKind kind, int status = 0) { return {{}, kind, status}; }
};

// Replies for successive calls that hit the same entry. Call n receives
// replies[min(n, size-1)], so a one-element script is a fixed response.
using MockScript = std::vector<MockReply>;

// Deterministic in-process backend. Lookup order for each call:
//   1. exact prompt hash (prompt_hash(messages))
//   2. first rule whose needle occurs inside a <comment>...</comment> block
//      of a user message (or anywhere in user messages without such blocks)
//   3. the default script
// With no match, complete() throws a kProtocol BackendError.
//
// Canned-response file (JSON):
//   {"responses": {"<prompt hash>": "text" | ["t1", "t2", ...]},
//    "rules": [{"contains": "needle", "response": "text" | [...]}],
//    "default": "text" | [...]}
// A script element may also be {"error": "timeout"|"transport"|"http_status", "status": 503}.
class MockChatBackend final : public ChatBackend {
 public:
  explicit MockChatBackend(std::string id);

  static std::shared_ptr<MockChatBackend> from_json(std::string id, std::string_view json_text);
  static std::shared_ptr<MockChatBackend> from_file(std::string id, const std::string& path);

  void add_exact(const std::string& hash, MockScript script);
  void add_rule(std::string needle, MockScript script);
  void set_default(MockScript script);
  // Simulated service time per call; lets tests overlap concurrent calls.
  void set_delay(std::chrono::milliseconds delay) { delay_ = delay; }

  const std::string& id() const override { return id_; }
  std::string complete(std::span<const ChatMessage> messages, const DecodingParams& params) override;

  std::size_t call_count() const { return calls_.load(); }
  std::vector<std::string> call_log() const;  // prompt hashes, in call order
  int peak_concurrency() const { return peak_.load(); }

 private:
  struct Entry {
    MockScript script;
    std::size_t next = 0;
  };

  MockReply next_reply(Entry& entry);

  std::string id_;
  std::chrono::milliseconds delay_{0};
  mutable std::mutex mutex_;
  std::map<std::string, Entry> exact_;
  std::vector<std::pair<std::string, Entry>> rules_;
  std::optional<Entry> default_;
  std::vector<std::string> log_;
  std::atomic<std::size_t> calls_{0};
  std::atomic<int> in_flight_{0};
  std::atomic<int> peak_{0};
};

}  // namespace revguard::backend

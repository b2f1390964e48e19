#include "revguard/backend/mock_backend.h"

#include <json.hpp>

#include <fstream>
#include <sstream>
#include <thread>

namespace revguard::backend {

using nlohmann::json;

namespace {

MockReply reply_from_json(const json& j) {
  if (j.is_string()) return MockReply::ok(j.get<std::string>());
  if (j.is_object() && j.contains("error")) {
    const std::string kind = j.at("error").get<std::string>();
    const int status = j.value("status", 0);
    if (kind == "timeout") return MockReply::fail(BackendErrorKind::kTimeout);
    if (kind == "transport") return MockReply::fail(BackendErrorKind::kTransport);
    if (kind == "http_status") return MockReply::fail(BackendErrorKind::kHttpStatus, status == 0 ? 500 : status);
    throw ConfigError("unknown mock error kind '" + kind + "'");
  }
  throw ConfigError("mock reply must be a string or an {\"error\": ...} object");
}

MockScript script_from_json(const json& j) {
  MockScript script;
  if (j.is_array()) {
    for (const json& item : j) script.push_back(reply_from_json(item));
  } else {
    script.push_back(reply_from_json(j));
  }
  if (script.empty()) throw ConfigError("mock script is empty");
  return script;
}

class InFlight {
 public:
  InFlight(std::atomic<int>& counter, std::atomic<int>& peak) : counter_(counter) {
    const int now = ++counter_;
    int seen = peak.load();
    while (now > seen && !peak.compare_exchange_weak(seen, now)) {
    }
  }
  ~InFlight() { --counter_; }

 private:
  std::atomic<int>& counter_;
};

}  // namespace

MockChatBackend::MockChatBackend(std::string id) : id_(std::move(id)) {}

std::shared_ptr<MockChatBackend> MockChatBackend::from_json(std::string id, std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError("malformed mock file for '" + id + "': " + e.what());
  }
  auto mock = std::make_shared<MockChatBackend>(std::move(id));
  try {
    if (doc.contains("responses")) {
      for (const auto& [hash, value] : doc.at("responses").items()) mock->add_exact(hash, script_from_json(value));
    }
    if (doc.contains("rules")) {
      for (const json& rule : doc.at("rules")) {
        const json& body = rule.contains("responses") ? rule.at("responses") : rule.at("response");
        mock->add_rule(rule.at("contains").get<std::string>(), script_from_json(body));
      }
    }
    if (doc.contains("default")) mock->set_default(script_from_json(doc.at("default")));
    if (doc.contains("delay_ms")) mock->set_delay(std::chrono::milliseconds(doc.at("delay_ms").get<int>()));
  } catch (const json::exception& e) {
    throw ConfigError("malformed mock file for '" + mock->id() + "': " + e.what());
  }
  return mock;
}

std::shared_ptr<MockChatBackend> MockChatBackend::from_file(std::string id, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open mock file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return from_json(std::move(id), buf.str());
}

void MockChatBackend::add_exact(const std::string& hash, MockScript script) {
  std::lock_guard lock(mutex_);
  exact_[hash] = Entry{std::move(script), 0};
}

void MockChatBackend::add_rule(std::string needle, MockScript script) {
  std::lock_guard lock(mutex_);
  rules_.emplace_back(std::move(needle), Entry{std::move(script), 0});
}

void MockChatBackend::set_default(MockScript script) {
  std::lock_guard lock(mutex_);
  default_ = Entry{std::move(script), 0};
}

MockReply MockChatBackend::next_reply(Entry& entry) {
  const std::size_t index = std::min(entry.next, entry.script.size() - 1);
  ++entry.next;
  return entry.script[index];
}

std::string MockChatBackend::complete(std::span<const ChatMessage> messages, const DecodingParams& /*params*/) {
  validate(messages);
  InFlight guard(in_flight_, peak_);
  ++calls_;
  const std::string hash = prompt_hash(messages);

  // Rules see the text inside <comment>...</comment> blocks of user
  // messages, or whole user messages when no such block exists.
  std::vector<std::string_view> haystacks;
  for (const ChatMessage& m : messages) {
    if (m.role != Role::kUser) continue;
    const std::string_view content = m.content;
    for (std::size_t pos = content.find("<comment>"); pos != std::string_view::npos;
         pos = content.find("<comment>", pos + 1)) {
      const std::size_t end = content.find("</comment>", pos);
      if (end == std::string_view::npos) break;
      haystacks.push_back(content.substr(pos + 9, end - pos - 9));
    }
  }
  if (haystacks.empty()) {
    for (const ChatMessage& m : messages) {
      if (m.role == Role::kUser) haystacks.push_back(m.content);
    }
  }
  auto mentions = [&](const std::string& needle) {
    for (std::string_view h : haystacks) {
      if (h.find(needle) != std::string_view::npos) return true;
    }
    return false;
  };

  std::optional<MockReply> reply;
  {
    std::lock_guard lock(mutex_);
    log_.push_back(hash);
    if (auto it = exact_.find(hash); it != exact_.end()) {
      reply = next_reply(it->second);
    } else {
      for (auto& [needle, entry] : rules_) {
        if (mentions(needle)) {
          reply = next_reply(entry);
          break;
        }
      }
      if (!reply && default_) reply = next_reply(*default_);
    }
  }
  if (delay_.count() > 0) std::this_thread::sleep_for(delay_);
  if (!reply) throw BackendError(BackendErrorKind::kProtocol, "mock '" + id_ + "' has no response for prompt " + hash);
  if (reply->failure) {
    throw BackendError(*reply->failure, "mock '" + id_ + "' simulated " + std::string(to_string(*reply->failure)),
                       reply->http_status);
  }
  return reply->text;
}

std::vector<std::string> MockChatBackend::call_log() const {
  std::lock_guard lock(mutex_);
  return log_;
}

}  // namespace revguard::backend

#include "revguard/gateway/event_log.h"

#include "revguard/core/errors.h"

#include <chrono>
#include <ctime>

namespace revguard::gateway {

EventLog::EventLog(const std::string& path) : path_(path) {
  if (path_.empty()) return;
  file_ = std::fopen(path_.c_str(), "ab");
  if (!file_) throw ConfigError("cannot open event log '" + path_ + "'");
}

EventLog::~EventLog() {
  if (file_) std::fclose(file_);
}

void EventLog::append(const nlohmann::json& record) {
  std::string line = record.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace);
  line += '\n';
  std::lock_guard lock(mutex_);
  ++count_;
  if (!file_) return;
  std::fwrite(line.data(), 1, line.size(), file_);
  std::fflush(file_);
}

void EventLog::flush() {
  std::lock_guard lock(mutex_);
  if (file_) std::fflush(file_);
}

std::size_t EventLog::count() const {
  std::lock_guard lock(mutex_);
  return count_;
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t secs = std::chrono::system_clock::to_time_t(now);
  const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(now.time_since_epoch()).count() % 1000;
  std::tm tm{};
  gmtime_r(&secs, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%S", &tm);
  char out[40];
  std::snprintf(out, sizeof out, "%s.%03dZ", buf, static_cast<int>(ms));
  return out;
}

}  // namespace revguard::gateway

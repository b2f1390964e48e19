#pragma once

#include <json.hpp>

#include <cstdio>
#include <mutex>
#include <string>

namespace revguard::gateway {

// Append-only line-record log. Each append writes one complete line with a
// single write call under a mutex, then flushes.
class EventLog {
 public:
  // Empty path: events are counted but not written.
  explicit EventLog(const std::string& path);
  ~EventLog();
  EventLog(const EventLog&) = delete;
  EventLog& operator=(const EventLog&) = delete;

  void append(const nlohmann::json& record);
  void flush();
  std::size_t count() const;
  const std::string& path() const { return path_; }

 private:
  std::string path_;
  std::FILE* file_ = nullptr;
  mutable std::mutex mutex_;
  std::size_t count_ = 0;
};

// ISO-8601 UTC with milliseconds, e.g. 2024-05-01T12:00:00.123Z.
std::string utc_timestamp();

}  // namespace revguard::gateway

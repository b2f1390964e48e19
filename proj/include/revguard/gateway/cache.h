#pragma once

#include <json.hpp>

#include <chrono>
#include <condition_variable>
#include <exception>
#include <functional>
#include <list>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>

namespace revguard::gateway {

using Clock = std::function<std::chrono::steady_clock::time_point()>;
Clock steady_clock_source();

// Hex sha256 over the length-prefixed fields ("<len>:<bytes>" each):
// normalized text, pipeline version, request flags.
std::string cache_key(std::string_view normalized_text, std::string_view pipeline_version, std::string_view flags);

struct CacheStats {
  std::size_t size = 0;
  std::size_t capacity = 0;
  std::uint64_t hits = 0;
  std::uint64_t misses = 0;
  std::uint64_t evictions = 0;
};

// LRU cache with a fixed time-to-live per entry. Thread safe.
class ResponseCache {
 public:
  ResponseCache(std::size_t capacity, std::chrono::seconds ttl, Clock clock = steady_clock_source());

  std::optional<nlohmann::json> get(const std::string& key);
  void put(const std::string& key, nlohmann::json value);
  CacheStats stats() const;

 private:
  struct Entry {
    std::string key;
    nlohmann::json value;
    std::chrono::steady_clock::time_point expires;
  };

  std::size_t capacity_;
  std::chrono::seconds ttl_;
  Clock clock_;
  mutable std::mutex mutex_;
  std::list<Entry> lru_;  // front = most recent
  std::unordered_map<std::string, std::list<Entry>::iterator> index_;
  CacheStats stats_;
};

// Collapses concurrent calls with the same key into one execution; every
// caller gets the leader's value or exception.
class SingleFlight {
 public:
  struct Result {
    nlohmann::json value;
    bool shared = false;  // true for callers that waited on another's call
  };

  Result run(const std::string& key, const std::function<nlohmann::json()>& fn);
  std::size_t in_flight() const;

 private:
  struct Call {
    bool done = false;
    nlohmann::json value;
    std::exception_ptr error;
  };

  mutable std::mutex mutex_;
  std::condition_variable cv_;
  std::map<std::string, std::shared_ptr<Call>> calls_;
};

}  // namespace revguard::gateway

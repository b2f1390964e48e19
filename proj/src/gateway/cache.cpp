#include "revguard/gateway/cache.h"

#include "revguard/core/errors.h"
#include "revguard/core/text.h"

namespace revguard::gateway {

Clock steady_clock_source() {
  return [] { return std::chrono::steady_clock::now(); };
}

std::string cache_key(std::string_view normalized_text, std::string_view pipeline_version, std::string_view flags) {
  // Length-prefixed fields, so no field content can shift a boundary.
  std::string material;
  for (std::string_view field : {normalized_text, pipeline_version, flags}) {
    material.append(std::to_string(field.size())).append(1, ':').append(field);
  }
  return text::sha256_hex(material);
}

ResponseCache::ResponseCache(std::size_t capacity, std::chrono::seconds ttl, Clock clock)
    : capacity_(capacity), ttl_(ttl), clock_(std::move(clock)) {
  if (capacity_ < 1) throw ConfigError("cache capacity must be >= 1");
  if (ttl_.count() <= 0) throw ConfigError("cache ttl must be positive");
  stats_.capacity = capacity_;
}

std::optional<nlohmann::json> ResponseCache::get(const std::string& key) {
  std::lock_guard lock(mutex_);
  auto it = index_.find(key);
  if (it == index_.end()) {
    ++stats_.misses;
    return std::nullopt;
  }
  if (clock_() >= it->second->expires) {
    lru_.erase(it->second);
    index_.erase(it);
    ++stats_.misses;
    return std::nullopt;
  }
  lru_.splice(lru_.begin(), lru_, it->second);
  ++stats_.hits;
  return lru_.front().value;
}

void ResponseCache::put(const std::string& key, nlohmann::json value) {
  std::lock_guard lock(mutex_);
  const auto expires = clock_() + ttl_;
  if (auto it = index_.find(key); it != index_.end()) {
    it->second->value = std::move(value);
    it->second->expires = expires;
    lru_.splice(lru_.begin(), lru_, it->second);
    return;
  }
  lru_.push_front(Entry{key, std::move(value), expires});
  index_[key] = lru_.begin();
  while (lru_.size() > capacity_) {
    index_.erase(lru_.back().key);
    lru_.pop_back();
    ++stats_.evictions;
  }
}

CacheStats ResponseCache::stats() const {
  std::lock_guard lock(mutex_);
  CacheStats s = stats_;
  s.size = lru_.size();
  return s;
}

SingleFlight::Result SingleFlight::run(const std::string& key, const std::function<nlohmann::json()>& fn) {
  std::unique_lock lock(mutex_);
  if (auto it = calls_.find(key); it != calls_.end()) {
    std::shared_ptr<Call> call = it->second;
    cv_.wait(lock, [&] { return call->done; });
    if (call->error) std::rethrow_exception(call->error);
    return {call->value, true};
  }
  auto call = std::make_shared<Call>();
  calls_.emplace(key, call);
  lock.unlock();

  try {
    nlohmann::json value = fn();
    lock.lock();
    call->value = value;
    call->done = true;
    calls_.erase(key);
    cv_.notify_all();
    return {std::move(value), false};
  } catch (...) {
    if (!lock.owns_lock()) lock.lock();
    call->error = std::current_exception();
    call->done = true;
    calls_.erase(key);
    cv_.notify_all();
    throw;
  }
}

std::size_t SingleFlight::in_flight() const {
  std::lock_guard lock(mutex_);
  return calls_.size();
}

}  // namespace revguard::gateway

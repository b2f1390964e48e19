#pragma once

#include "revguard/backend/registry.h"
#include "revguard/core/errors.h"
#include "revguard/core/taxonomy.h"
#include "revguard/core/types.h"
#include "revguard/gateway/cache.h"
#include "revguard/gateway/config.h"
#include "revguard/gateway/event_log.h"

#include <json.hpp>

#include <memory>
#include <optional>
#include <string>

namespace revguard::gateway {

// A request rejected before any stage ran. Maps onto an HTTP status.
class RequestError : public ValidationError {
 public:
  RequestError(int status, std::string code, const std::string& message)
      : ValidationError(message), status_(status), code_(std::move(code)) {}
  int status() const { return status_; }
  const std::string& code() const { return code_; }

 private:
  int status_;
  std::string code_;
};

struct ModerateRequest {
  std::string text;
  std::optional<std::string> context;
  bool want_rewrite = false;
  // Defaults to the comment hash.
  std::optional<std::string> comment_id;
};

enum class FeedbackAction { kAcceptedRewrite, kEdited, kDismissed, kReportedFalsePositive };
std::string_view to_string(FeedbackAction action);
// Throws RequestError(400) on unknown strings.
FeedbackAction parse_feedback_action(std::string_view s);

struct FeedbackRecord {
  std::string comment_hash;
  FeedbackAction action = FeedbackAction::kDismissed;
  std::string timestamp;  // filled in by the gateway when empty
  std::optional<std::string> note;
};

// sha256 of the normalized text; the comment id used by the gateway and the
// hash stored in the event log.
std::string comment_hash(std::string_view text);

// Composes filter, coach and reframer behind a response cache, single-flight
// de-duplication and an event log. All methods are safe to call
// concurrently.
class Gateway {
 public:
  Gateway(GatewayConfig cfg, std::shared_ptr<backend::BackendRegistry> registry, Taxonomy taxonomy,
          Clock clock = steady_clock_source());

  // Builds the registry, taxonomy, lexicon and prompt template from config.
  static std::unique_ptr<Gateway> from_config(const GatewayConfig& cfg,
                                              std::shared_ptr<backend::Transport> transport = nullptr);

  // Filter, then coach when toxic, then reframer when toxic and requested.
  // Throws RequestError for bad input and StageError for backend failures.
  PipelineOutcome moderate(const ModerateRequest& request);
  Verdict classify(std::string_view text);
  RewriteResult reframe(std::string_view text);
  void feedback(FeedbackRecord record);
  nlohmann::json health();

  // Config pipeline_version plus a digest of the stage settings; part of
  // every cache key.
  const std::string& pipeline_version() const { return version_; }
  const GatewayConfig& config() const { return cfg_; }
  const Taxonomy& taxonomy() const { return taxonomy_; }
  backend::BackendRegistry& registry() { return *registry_; }
  CacheStats cache_stats() const { return cache_.stats(); }
  EventLog& event_log() { return log_; }

 private:
  std::string checked_text(std::string_view text) const;
  // Cache lookup, then single-flight computation and cache fill.
  nlohmann::json cached_call(const std::string& key, bool& served_from_cache,
                             const std::function<nlohmann::json()>& compute);
  void log_event(nlohmann::json record, const std::string& hash, std::string_view text);

  GatewayConfig cfg_;
  std::shared_ptr<backend::BackendRegistry> registry_;
  Taxonomy taxonomy_;
  std::string version_;
  ResponseCache cache_;
  SingleFlight flights_;
  EventLog log_;
};

}  // namespace revguard::gateway

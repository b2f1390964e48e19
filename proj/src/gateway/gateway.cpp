#include "revguard/gateway/gateway.h"

#include "revguard/backend/lexicon.h"
#include "revguard/coach/coach.h"
#include "revguard/coach/prompt_template.h"
#include "revguard/core/json_io.h"
#include "revguard/core/text.h"
#include "revguard/filter/toxicity_filter.h"
#include "revguard/reframer/reframer.h"

#include <chrono>

namespace revguard::gateway {

using nlohmann::json;

namespace {

std::size_t code_points(std::string_view s) {
  std::size_t n = 0;
  for (unsigned char c : s) n += (c & 0xC0) != 0x80 ? 1 : 0;
  return n;
}

json filter_json(const filter::FilterConfig& f) {
  return json{{"backend", f.backend_id}, {"threshold", f.threshold}, {"normalize_code_spans", f.normalize_code_spans}};
}

std::string derive_version(const GatewayConfig& cfg, const Taxonomy& taxonomy) {
  const coach::PromptTemplate& tmpl =
      cfg.coach.prompt_template ? *cfg.coach.prompt_template : coach::PromptTemplate::builtin();
  const json settings = {
      {"taxonomy", taxonomy.version()},
      {"template", tmpl.version()},
      {"filter", filter_json(cfg.filter)},
      {"coach", {{"backend", cfg.coach.backend_id}, {"persona", cfg.coach.persona},
                 {"parse_mode", cfg.coach.parse_mode == coach::ParseMode::kStrict ? "strict" : "lenient"}}},
      {"reframe",
       {{"backend", cfg.reframe.backend_id},
        {"max_attempts", cfg.reframe.max_attempts},
        {"fluency_threshold", cfg.reframe.fluency_threshold},
        {"similarity_threshold", cfg.reframe.similarity_threshold},
        {"preserve_code", cfg.reframe.preserve_code},
        {"verification_filter", filter_json(cfg.reframe.verification_filter)}}},
  };
  return cfg.pipeline_version + "+" + text::sha256_hex(settings.dump()).substr(0, 12);
}

template <typename F>
auto timed(std::map<std::string, std::int64_t>& timings, const std::string& stage, F&& f) {
  const auto start = std::chrono::steady_clock::now();
  struct Record {
    std::map<std::string, std::int64_t>& timings;
    const std::string& stage;
    std::chrono::steady_clock::time_point start;
    ~Record() {
      timings[stage] =
          std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start).count();
    }
  } record{timings, stage, start};
  return f();
}

}  // namespace

std::string_view to_string(FeedbackAction action) {
  switch (action) {
    case FeedbackAction::kAcceptedRewrite: return "accepted_rewrite";
    case FeedbackAction::kEdited: return "edited";
    case FeedbackAction::kDismissed: return "dismissed";
    case FeedbackAction::kReportedFalsePositive: return "reported_false_positive";
  }
  return "dismissed";
}

FeedbackAction parse_feedback_action(std::string_view s) {
  if (s == "accepted_rewrite") return FeedbackAction::kAcceptedRewrite;
  if (s == "edited") return FeedbackAction::kEdited;
  if (s == "dismissed") return FeedbackAction::kDismissed;
  if (s == "reported_false_positive") return FeedbackAction::kReportedFalsePositive;
  throw RequestError(400, "invalid_request", "unknown feedback action '" + std::string(s) + "'");
}

std::string comment_hash(std::string_view text) { return text::sha256_hex(text::normalize(text)); }

Gateway::Gateway(GatewayConfig cfg, std::shared_ptr<backend::BackendRegistry> registry, Taxonomy taxonomy, Clock clock)
    : cfg_(std::move(cfg)),
      registry_(std::move(registry)),
      taxonomy_(std::move(taxonomy)),
      version_(derive_version(cfg_, taxonomy_)),
      cache_(cfg_.cache_capacity, cfg_.cache_ttl, std::move(clock)),
      log_(cfg_.event_log_path) {
  validate(cfg_);
  if (!registry_) throw ConfigError("gateway needs a backend registry");
}

std::unique_ptr<Gateway> Gateway::from_config(const GatewayConfig& cfg, std::shared_ptr<backend::Transport> transport) {
  GatewayConfig resolved = cfg;
  auto registry = backend::BackendRegistry::from_configs(cfg.backends, std::move(transport));
  if (!cfg.lexicon_path.empty()) registry->set_lexicon(backend::Lexicon::load_file(cfg.lexicon_path));
  const std::string taxonomy_path =
      cfg.taxonomy_path.empty() ? default_data_dir() + "/taxonomy/default.json" : cfg.taxonomy_path;
  Taxonomy taxonomy = load_taxonomy_file(taxonomy_path);
  if (!cfg.prompt_template_path.empty()) {
    resolved.coach.prompt_template =
        std::make_shared<const coach::PromptTemplate>(coach::PromptTemplate::load_file(cfg.prompt_template_path));
  }
  return std::make_unique<Gateway>(std::move(resolved), std::move(registry), std::move(taxonomy));
}

std::string Gateway::checked_text(std::string_view text) const {
  if (text::is_blank(text)) throw RequestError(400, "invalid_request", "text is empty");
  if (code_points(text) > cfg_.max_text_length) {
    throw RequestError(413, "too_large",
                       "text exceeds the maximum length of " + std::to_string(cfg_.max_text_length) + " characters");
  }
  return text::normalize(text);
}

json Gateway::cached_call(const std::string& key, bool& served_from_cache, const std::function<json()>& compute) {
  if (auto hit = cache_.get(key)) {
    served_from_cache = true;
    return *hit;
  }
  SingleFlight::Result r = flights_.run(key, [&] {
    json value = compute();
    cache_.put(key, value);
    return value;
  });
  served_from_cache = r.shared;
  return std::move(r.value);
}

void Gateway::log_event(json record, const std::string& hash, std::string_view text) {
  record["ts"] = utc_timestamp();
  record["comment_hash"] = hash;
  record["pipeline_version"] = version_;
  if (cfg_.persist_text) record["text"] = std::string(text);
  log_.append(record);
}

PipelineOutcome Gateway::moderate(const ModerateRequest& request) {
  const std::string text = checked_text(request.text);
  const std::string hash = text::sha256_hex(text);
  const std::string key = cache_key(text, version_, request.want_rewrite ? "moderate:rewrite" : "moderate");

  bool from_cache = false;
  json data = cached_call(key, from_cache, [&] {
    CommentRecord comment{hash, text, std::nullopt, std::nullopt, std::nullopt, request.context};
    PipelineOutcome out;
    out.comment_id = hash;
    out.verdict = timed(out.stage_timings, "filter", [&] { return filter::classify(comment, cfg_.filter, *registry_); });
    if (out.verdict.toxic()) {
      out.assignment = timed(out.stage_timings, "coach",
                             [&] { return coach::categorize(comment, taxonomy_, cfg_.coach, *registry_); });
      if (request.want_rewrite) {
        out.rewrite = timed(out.stage_timings, "reframer", [&] {
          return reframer::reframe(comment, out.assignment, cfg_.reframe, *registry_, out.verdict, &taxonomy_);
        });
      }
    }
    return json(out);
  });

  PipelineOutcome outcome = data.get<PipelineOutcome>();
  outcome.comment_id = request.comment_id.value_or(hash);
  if (from_cache) {
    outcome.verdict.cached = true;
    outcome.stage_timings.clear();
  }

  json event = {{"event", "moderate"},
                {"label", to_string(outcome.verdict.label)},
                {"confidence", outcome.verdict.confidence},
                {"cached", outcome.verdict.cached},
                {"categories", outcome.assignment ? json(outcome.assignment->categories) : json::array()},
                {"rewritten", outcome.rewrite.has_value()}};
  log_event(std::move(event), hash, text);
  return outcome;
}

Verdict Gateway::classify(std::string_view raw) {
  const std::string text = checked_text(raw);
  const std::string hash = text::sha256_hex(text);
  bool from_cache = false;
  json data = cached_call(cache_key(text, version_, "classify"), from_cache,
                          [&] { return json(filter::classify_text(text, cfg_.filter, *registry_)); });
  Verdict verdict = data.get<Verdict>();
  verdict.cached = from_cache;
  log_event({{"event", "classify"},
             {"label", to_string(verdict.label)},
             {"confidence", verdict.confidence},
             {"cached", from_cache}},
            hash, text);
  return verdict;
}

RewriteResult Gateway::reframe(std::string_view raw) {
  const std::string text = checked_text(raw);
  const std::string hash = text::sha256_hex(text);
  bool from_cache = false;
  json data = cached_call(cache_key(text, version_, "reframe"), from_cache, [&] {
    CommentRecord comment{hash, text, std::nullopt, std::nullopt, std::nullopt, std::nullopt};
    const Verdict verdict = filter::classify(comment, cfg_.filter, *registry_);
    if (!verdict.toxic()) throw RequestError(400, "not_toxic", "text is not judged toxic; nothing to rewrite");
    return json(reframer::reframe(comment, std::nullopt, cfg_.reframe, *registry_, verdict, &taxonomy_));
  });
  RewriteResult result = data.get<RewriteResult>();
  log_event({{"event", "reframe"}, {"style_pass", result.style_pass}, {"attempts", result.attempts}, {"cached", from_cache}},
            hash, text);
  return result;
}

void Gateway::feedback(FeedbackRecord record) {
  if (record.comment_hash.empty()) throw RequestError(400, "invalid_request", "comment_hash is required");
  if (record.timestamp.empty()) record.timestamp = utc_timestamp();
  json event = {{"event", "feedback"},
                {"ts", record.timestamp},
                {"comment_hash", record.comment_hash},
                {"action", to_string(record.action)},
                {"pipeline_version", version_}};
  if (record.note) event["note"] = *record.note;
  log_.append(event);
}

json Gateway::health() {
  auto probe_scorer = [&](const std::string& id) {
    try {
      return registry_->scorer(id)->probe();
    } catch (const Error&) {
      return false;
    }
  };
  auto probe_chat = [&](const std::string& id) {
    try {
      return registry_->chat(id)->probe();
    } catch (const Error&) {
      return false;
    }
  };
  json stages = json::array();
  const std::pair<const char*, std::pair<std::string, bool>> rows[] = {
      {"filter", {cfg_.filter.backend_id, probe_scorer(cfg_.filter.backend_id)}},
      {"coach", {cfg_.coach.backend_id, probe_chat(cfg_.coach.backend_id)}},
      {"reframer", {cfg_.reframe.backend_id, probe_chat(cfg_.reframe.backend_id)}},
  };
  bool all_up = true;
  for (const auto& [stage, info] : rows) {
    stages.push_back({{"stage", stage}, {"backend", info.first}, {"reachable", info.second}});
    all_up = all_up && info.second;
  }
  const CacheStats s = cache_.stats();
  return json{{"status", all_up ? "ok" : "degraded"},
              {"pipeline_version", version_},
              {"taxonomy_version", taxonomy_.version()},
              {"stages", stages},
              {"cache",
               {{"size", s.size},
                {"capacity", s.capacity},
                {"hits", s.hits},
                {"misses", s.misses},
                {"evictions", s.evictions}}}};
}

}  // namespace revguard::gateway

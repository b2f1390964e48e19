#include "revguard/core/json_io.h"

namespace revguard {

using nlohmann::json;

namespace {

template <typename T>
void put_optional(json& j, const char* key, const std::optional<T>& value) {
  if (value) j[key] = *value;
}

template <typename T>
void get_optional(const json& j, const char* key, std::optional<T>& out) {
  if (auto it = j.find(key); it != j.end() && !it->is_null()) out = it->get<T>();
}

}  // namespace

void to_json(json& j, const CommentRecord& c) {
  j = json{{"id", c.id}, {"body", c.body}};
  put_optional(j, "source", c.source);
  put_optional(j, "author", c.author);
  put_optional(j, "created_at", c.created_at);
  put_optional(j, "context", c.context);
}

void from_json(const json& j, CommentRecord& c) {
  c.id = j.at("id").get<std::string>();
  c.body = j.at("body").get<std::string>();
  get_optional(j, "source", c.source);
  get_optional(j, "author", c.author);
  get_optional(j, "created_at", c.created_at);
  get_optional(j, "context", c.context);
}

void to_json(json& j, const Verdict& v) {
  j = json{{"label", to_string(v.label)},       {"confidence", v.confidence},
           {"threshold", v.threshold},          {"backend_id", v.backend_id},
           {"latency_ms", v.latency_ms},        {"cached", v.cached}};
}

void from_json(const json& j, Verdict& v) {
  v.label = parse_label(j.at("label").get<std::string>());
  v.confidence = j.at("confidence").get<double>();
  v.threshold = j.at("threshold").get<double>();
  v.backend_id = j.value("backend_id", std::string{});
  v.latency_ms = j.value("latency_ms", std::int64_t{0});
  v.cached = j.value("cached", false);
}

void to_json(json& j, const CategoryAssignment& a) {
  j = json{{"categories", a.categories},
           {"explanations", a.explanations},
           {"raw_response", a.raw_response},
           {"parse_status", to_string(a.parse_status)},
           {"warnings", a.warnings},
           {"raw_trace", a.raw_trace}};
}

void from_json(const json& j, CategoryAssignment& a) {
  a.categories = j.at("categories").get<std::set<std::string>>();
  a.explanations = j.value("explanations", std::map<std::string, std::string>{});
  a.raw_response = j.value("raw_response", std::string{});
  a.parse_status = parse_parse_status(j.at("parse_status").get<std::string>());
  a.warnings = j.value("warnings", std::vector<std::string>{});
  a.raw_trace = j.value("raw_trace", std::vector<std::string>{});
}

void to_json(json& j, const RewriteResult& r) {
  j = json{{"original", r.original},
           {"rewritten", r.rewritten},
           {"rationale", r.rationale},
           {"style_pass", r.style_pass},
           {"code_preserved", r.code_preserved},
           {"fluency_score", r.fluency_score},
           {"content_similarity", r.content_similarity},
           {"attempts", r.attempts}};
}

void from_json(const json& j, RewriteResult& r) {
  r.original = j.at("original").get<std::string>();
  r.rewritten = j.at("rewritten").get<std::string>();
  r.rationale = j.value("rationale", std::string{});
  r.style_pass = j.at("style_pass").get<bool>();
  r.code_preserved = j.value("code_preserved", true);
  r.fluency_score = j.at("fluency_score").get<double>();
  r.content_similarity = j.at("content_similarity").get<double>();
  r.attempts = j.at("attempts").get<int>();
}

void to_json(json& j, const PipelineOutcome& o) {
  j = json{{"comment_id", o.comment_id}, {"verdict", o.verdict}, {"stage_timings", o.stage_timings}};
  j["assignment"] = o.assignment ? json(*o.assignment) : json(nullptr);
  j["rewrite"] = o.rewrite ? json(*o.rewrite) : json(nullptr);
}

void from_json(const json& j, PipelineOutcome& o) {
  o.comment_id = j.at("comment_id").get<std::string>();
  o.verdict = j.at("verdict").get<Verdict>();
  o.stage_timings = j.value("stage_timings", std::map<std::string, std::int64_t>{});
  o.assignment.reset();
  o.rewrite.reset();
  if (auto it = j.find("assignment"); it != j.end() && !it->is_null()) o.assignment = it->get<CategoryAssignment>();
  if (auto it = j.find("rewrite"); it != j.end() && !it->is_null()) o.rewrite = it->get<RewriteResult>();
}

json strip_timing_fields(json j) {
  if (j.is_object()) {
    j.erase("latency_ms");
    j.erase("stage_timings");
    for (auto& [key, value] : j.items()) value = strip_timing_fields(std::move(value));
  } else if (j.is_array()) {
    for (auto& value : j) value = strip_timing_fields(std::move(value));
  }
  return j;
}

}  // namespace revguard

#include "revguard/gateway/config.h"

#include "revguard/core/errors.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#ifndef REVGUARD_DATA_DIR
#define REVGUARD_DATA_DIR "data"
#endif

namespace revguard::gateway {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string resolve(const std::string& base_dir, const std::string& path) {
  if (path.empty()) return path;
  const fs::path p(path);
  if (p.is_absolute()) return path;
  return (fs::path(base_dir) / p).lexically_normal().string();
}

filter::FilterConfig parse_filter(const json& j, filter::FilterConfig cfg) {
  cfg.backend_id = j.value("backend", cfg.backend_id);
  cfg.threshold = j.value("threshold", cfg.threshold);
  cfg.normalize_code_spans = j.value("normalize_code_spans", cfg.normalize_code_spans);
  return cfg;
}

}  // namespace

EnvLookup process_env() {
  return [](const std::string& name) -> std::optional<std::string> {
    if (const char* v = std::getenv(name.c_str()); v && *v) return std::string(v);
    return std::nullopt;
  };
}

std::string default_data_dir() {
  if (const char* v = std::getenv("REVGUARD_DATA_DIR"); v && *v) return v;
  return REVGUARD_DATA_DIR;
}

backend::BackendConfig parse_backend_config(const json& j, const std::string& base_dir) {
  backend::BackendConfig b;
  b.backend_id = j.at("id").get<std::string>();
  const std::string kind = j.value("kind", std::string("http"));
  if (kind == "http") {
    b.kind = backend::BackendKind::kHttp;
  } else if (kind == "mock") {
    b.kind = backend::BackendKind::kMock;
  } else {
    throw ConfigError("backend '" + b.backend_id + "': unknown kind '" + kind + "'");
  }
  b.endpoint = j.value("endpoint", std::string{});
  b.model = j.value("model", std::string{});
  b.auth_token_env = j.value("auth_token_env", std::string{});
  b.timeout_ms = j.value("timeout_ms", b.timeout_ms);
  b.max_retries = j.value("max_retries", b.max_retries);
  b.max_concurrent_requests = j.value("max_concurrent_requests", b.max_concurrent_requests);
  b.mock_file = resolve(base_dir, j.value("mock_file", std::string{}));
  backend::validate(b);
  return b;
}

void validate(const GatewayConfig& cfg) {
  if (cfg.port < 0 || cfg.port > 65535) throw ConfigError("port out of range");
  if (cfg.cache_capacity < 1) throw ConfigError("cache capacity must be >= 1");
  if (cfg.cache_ttl.count() <= 0) throw ConfigError("cache ttl must be positive");
  if (cfg.max_text_length < 1) throw ConfigError("max_text_length must be >= 1");
  if (cfg.pipeline_version.empty()) throw ConfigError("pipeline_version is empty");
  filter::validate(cfg.filter);
  reframer::validate(cfg.reframe);
}

GatewayConfig parse_gateway_config(std::string_view json_text, const std::string& base_dir, const EnvLookup& env) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config must be a JSON object");

  GatewayConfig cfg;
  try {
    if (j.contains("listen")) {
      cfg.host = j["listen"].value("host", cfg.host);
      cfg.port = j["listen"].value("port", cfg.port);
    }
    cfg.pipeline_version = j.value("pipeline_version", cfg.pipeline_version);
    if (j.contains("backends")) {
      for (const json& b : j.at("backends")) cfg.backends.push_back(parse_backend_config(b, base_dir));
    }
    cfg.taxonomy_path = resolve(base_dir, j.value("taxonomy", std::string{}));
    cfg.lexicon_path = resolve(base_dir, j.value("lexicon", std::string{}));
    cfg.prompt_template_path = resolve(base_dir, j.value("prompt_template", std::string{}));

    if (j.contains("filter")) cfg.filter = parse_filter(j["filter"], cfg.filter);

    cfg.coach.backend_id = "coach";
    if (j.contains("coach")) {
      const json& c = j["coach"];
      cfg.coach.backend_id = c.value("backend", cfg.coach.backend_id);
      cfg.coach.persona = c.value("persona", cfg.coach.persona);
      const std::string mode = c.value("parse_mode", std::string("lenient"));
      if (mode == "strict") {
        cfg.coach.parse_mode = coach::ParseMode::kStrict;
      } else if (mode == "lenient") {
        cfg.coach.parse_mode = coach::ParseMode::kLenient;
      } else {
        throw ConfigError("coach.parse_mode must be strict or lenient");
      }
      cfg.coach.max_tokens = c.value("max_tokens", cfg.coach.max_tokens);
    }

    cfg.reframe.backend_id = cfg.coach.backend_id;
    cfg.reframe.verification_filter = cfg.filter;
    if (j.contains("reframe")) {
      const json& r = j["reframe"];
      cfg.reframe.backend_id = r.value("backend", cfg.reframe.backend_id);
      cfg.reframe.max_attempts = r.value("max_attempts", cfg.reframe.max_attempts);
      cfg.reframe.fluency_threshold = r.value("fluency_threshold", cfg.reframe.fluency_threshold);
      cfg.reframe.similarity_threshold = r.value("similarity_threshold", cfg.reframe.similarity_threshold);
      cfg.reframe.preserve_code = r.value("preserve_code", cfg.reframe.preserve_code);
      cfg.reframe.max_tokens = r.value("max_tokens", cfg.reframe.max_tokens);
      if (r.contains("verification_filter")) {
        cfg.reframe.verification_filter = parse_filter(r["verification_filter"], cfg.filter);
      }
    }

    if (j.contains("cache")) {
      const json& c = j["cache"];
      const auto capacity = c.value("capacity", static_cast<std::int64_t>(cfg.cache_capacity));
      if (capacity < 1) throw ConfigError("cache capacity must be >= 1");
      cfg.cache_capacity = static_cast<std::size_t>(capacity);
      cfg.cache_ttl = std::chrono::seconds(c.value("ttl_seconds", static_cast<std::int64_t>(cfg.cache_ttl.count())));
    }
    if (j.contains("event_log")) {
      cfg.event_log_path = resolve(base_dir, j["event_log"].value("path", std::string{}));
      cfg.persist_text = j["event_log"].value("persist_text", false);
    }
    if (j.contains("cors")) {
      cfg.allowed_origins = j["cors"].value("allowed_origins", std::vector<std::string>{});
    }
    std::string token_env = "REVGUARD_TOKEN";
    if (j.contains("auth")) {
      const json& a = j["auth"];
      if (a.contains("token")) cfg.bearer_token = a.at("token").get<std::string>();
      token_env = a.value("token_env", token_env);
    }
    if (auto token = env(token_env)) cfg.bearer_token = *token;
    const auto max_len = j.value("max_text_length", static_cast<std::int64_t>(cfg.max_text_length));
    if (max_len < 1) throw ConfigError("max_text_length must be >= 1");
    cfg.max_text_length = static_cast<std::size_t>(max_len);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("invalid config: ") + e.what());
  }

  if (auto host = env("REVGUARD_HOST")) cfg.host = *host;
  if (auto port = env("REVGUARD_PORT")) {
    try {
      cfg.port = std::stoi(*port);
    } catch (const std::exception&) {
      throw ConfigError("REVGUARD_PORT is not a number");
    }
  }
  if (auto log = env("REVGUARD_EVENT_LOG")) cfg.event_log_path = *log;

  validate(cfg);
  return cfg;
}

GatewayConfig load_gateway_config(const std::string& path, const EnvLookup& env) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  const fs::path parent = fs::path(path).parent_path();
  return parse_gateway_config(buf.str(), parent.empty() ? "." : parent.string(), env);
}

}  // namespace revguard::gateway

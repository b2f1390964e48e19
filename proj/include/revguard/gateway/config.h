#pragma once

#include "revguard/backend/backend.h"
#include "revguard/coach/coach.h"
#include "revguard/filter/toxicity_filter.h"
#include "revguard/reframer/reframer.h"

#include <json.hpp>

#include <chrono>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace revguard::gateway {

struct GatewayConfig {
  std::string host = "127.0.0.1";
  int port = 8787;

  std::vector<backend::BackendConfig> backends;
  std::string taxonomy_path;         // built-in default taxonomy when empty
  std::string lexicon_path;          // built-in lexicon when empty
  std::string prompt_template_path;  // built-in coach template when empty

  filter::FilterConfig filter;
  coach::CoachConfig coach;
  reframer::ReframeConfig reframe;

  std::size_t cache_capacity = 10000;
  std::chrono::seconds cache_ttl{24 * 3600};

  std::string event_log_path;
  bool persist_text = false;  // store full comment text in the event log

  std::vector<std::string> allowed_origins;
  std::optional<std::string> bearer_token;
  std::string pipeline_version = "1";
  std::size_t max_text_length = 20000;  // Unicode code points
};

// Throws ConfigError.
void validate(const GatewayConfig& cfg);

using EnvLookup = std::function<std::optional<std::string>(const std::string&)>;
EnvLookup process_env();

// Parses the JSON config. Relative paths resolve against `base_dir`.
// Environment overrides: REVGUARD_HOST, REVGUARD_PORT, REVGUARD_EVENT_LOG,
// and the bearer token from the variable named by auth.token_env
// (default REVGUARD_TOKEN).
GatewayConfig parse_gateway_config(std::string_view json_text, const std::string& base_dir = ".",
                                   const EnvLookup& env = process_env());
GatewayConfig load_gateway_config(const std::string& path, const EnvLookup& env = process_env());

backend::BackendConfig parse_backend_config(const nlohmann::json& j, const std::string& base_dir = ".");

// Directory holding the default taxonomy, prompts and lexicon.
std::string default_data_dir();

}  // namespace revguard::gateway

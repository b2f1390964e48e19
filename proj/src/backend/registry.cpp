#include "revguard/backend/registry.h"

#include "revguard/backend/mock_backend.h"
#include "revguard/core/errors.h"

namespace revguard::backend {

BackendRegistry::BackendRegistry() {
  scorers_["lexicon"] = std::make_shared<LexiconScorer>(Lexicon::builtin());
}

std::shared_ptr<BackendRegistry> BackendRegistry::from_configs(const std::vector<BackendConfig>& configs,
                                                               std::shared_ptr<Transport> transport) {
  auto registry = std::make_shared<BackendRegistry>();
  if (!transport) transport = std::make_shared<HttplibTransport>();
  for (const BackendConfig& cfg : configs) {
    validate(cfg);
    if (registry->has_chat(cfg.backend_id)) throw ConfigError("duplicate backend id '" + cfg.backend_id + "'");
    if (cfg.kind == BackendKind::kMock) {
      auto mock = cfg.mock_file.empty() ? std::make_shared<MockChatBackend>(cfg.backend_id)
                                        : MockChatBackend::from_file(cfg.backend_id, cfg.mock_file);
      registry->add_chat(std::move(mock));
    } else {
      registry->add_chat(std::make_shared<HttpChatBackend>(cfg, transport));
    }
  }
  return registry;
}

void BackendRegistry::add_chat(std::shared_ptr<ChatBackend> backend) {
  std::lock_guard lock(mutex_);
  const std::string id = backend->id();
  scorers_.erase(id);  // drop any stale completion scorer built over a previous backend
  chats_[id] = std::move(backend);
}

void BackendRegistry::add_scorer(std::shared_ptr<ScoringBackend> scorer) {
  std::lock_guard lock(mutex_);
  const std::string id = scorer->id();
  scorers_[id] = std::move(scorer);
}

void BackendRegistry::set_lexicon(Lexicon lexicon) {
  std::lock_guard lock(mutex_);
  scorers_["lexicon"] = std::make_shared<LexiconScorer>(std::move(lexicon));
}

std::shared_ptr<ChatBackend> BackendRegistry::chat(const std::string& id) const {
  std::lock_guard lock(mutex_);
  auto it = chats_.find(id);
  if (it == chats_.end()) throw BackendError(BackendErrorKind::kNotRegistered, "no backend registered as '" + id + "'");
  return it->second;
}

std::shared_ptr<ScoringBackend> BackendRegistry::scorer(const std::string& id) const {
  std::lock_guard lock(mutex_);
  if (auto it = scorers_.find(id); it != scorers_.end()) return it->second;
  auto chat_it = chats_.find(id);
  if (chat_it == chats_.end()) throw BackendError(BackendErrorKind::kNotRegistered, "no scorer registered as '" + id + "'");
  auto scorer = std::make_shared<CompletionScorer>(chat_it->second);
  scorers_[id] = scorer;
  return scorer;
}

bool BackendRegistry::has_chat(const std::string& id) const {
  std::lock_guard lock(mutex_);
  return chats_.count(id) > 0;
}

}  // namespace revguard::backend

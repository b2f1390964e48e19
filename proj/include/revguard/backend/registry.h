#pragma once

#include "revguard/backend/backend.h"
#include "revguard/backend/http_backend.h"
#include "revguard/backend/lexicon.h"

#include <map>
#include <memory>
#include <mutex>

namespace revguard::backend {

// Maps backend ids to shared backend instances. The id "lexicon" always
// resolves to a lexicon scorer (the built-in list unless replaced).
class BackendRegistry {
 public:
  BackendRegistry();

  // Builds HTTP or mock chat backends from configs. Throws ConfigError.
  static std::shared_ptr<BackendRegistry> from_configs(const std::vector<BackendConfig>& configs,
                                                       std::shared_ptr<Transport> transport = nullptr);

  void add_chat(std::shared_ptr<ChatBackend> backend);
  void add_scorer(std::shared_ptr<ScoringBackend> scorer);
  void set_lexicon(Lexicon lexicon);

  // Throws BackendError(kNotRegistered) for unknown ids.
  std::shared_ptr<ChatBackend> chat(const std::string& id) const;

  // A registered scorer, or a CompletionScorer over the chat backend with
  // the same id.
  std::shared_ptr<ScoringBackend> scorer(const std::string& id) const;

  bool has_chat(const std::string& id) const;

 private:
  mutable std::mutex mutex_;
  std::map<std::string, std::shared_ptr<ChatBackend>> chats_;
  mutable std::map<std::string, std::shared_ptr<ScoringBackend>> scorers_;
};

}  // namespace revguard::backend

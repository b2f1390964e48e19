#pragma once

#include "revguard/backend/backend.h"
#include "revguard/backend/registry.h"
#include "revguard/coach/prompt_template.h"
#include "revguard/core/taxonomy.h"
#include "revguard/core/types.h"

#include <bitset>
#include <memory>

namespace revguard::coach {

inline constexpr std::string_view kDefaultPersona =
    "an experienced open-source maintainer who has reviewed thousands of pull requests";

struct CoachPrompt {
  std::vector<backend::ChatMessage> messages;
  std::string taxonomy_version;
  std::string template_version;
  // Indexed by ProtocolElement.
  std::bitset<5> protocol_elements;

  bool complete() const { return protocol_elements.all(); }
};

enum class ParseMode { kStrict, kLenient };

struct CoachConfig {
  std::string backend_id;
  std::string persona = std::string(kDefaultPersona);
  ParseMode parse_mode = ParseMode::kLenient;
  int max_tokens = 1024;
  std::shared_ptr<const PromptTemplate> prompt_template;  // builtin when null
};

// The literal response-schema block inserted for {{schema}}.
std::string response_schema(const Taxonomy& taxonomy);

// Category list inserted for {{definitions}}: every category with its id,
// display name, definition and all exemplars, in taxonomy order.
std::string render_definitions(const Taxonomy& taxonomy);

// Deterministic in its inputs. Throws ValidationError for a blank persona
// or an invalid comment.
CoachPrompt build_coach_prompt(const CommentRecord& comment, const Taxonomy& taxonomy, std::string_view persona,
                               const PromptTemplate& tmpl = PromptTemplate::builtin());

// Total over text; never throws. Strict mode accepts only a document that
// matches the schema. Lenient mode falls back to scanning for well-formed
// category elements (status lenient_recovered). Unknown names are dropped
// with a warning; duplicates keep the first explanation. A result with no
// known category is `failed`.
CategoryAssignment parse_coach_response(std::string_view raw, const Taxonomy& taxonomy, ParseMode mode);

// Corrective follow-up sent after an unparseable reply.
std::string corrective_instruction(const Taxonomy& taxonomy);

// Prompts the configured backend at temperature 0 and parses the reply;
// on a failed parse, retries once with the corrective instruction appended.
// Backend failures are rethrown as StageError tagged "coach"; a second
// parse failure is returned as parse_status == failed.
CategoryAssignment categorize(const CommentRecord& comment, const Taxonomy& taxonomy, const CoachConfig& cfg,
                              const backend::BackendRegistry& registry);

}  // namespace revguard::coach

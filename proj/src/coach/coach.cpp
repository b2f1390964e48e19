#include "revguard/coach/coach.h"

#include "revguard/coach/xml_reader.h"
#include "revguard/core/errors.h"
#include "revguard/core/text.h"

namespace revguard::coach {

namespace {

struct Resolved {
  bool ok = false;
  std::set<std::string> categories;
  std::map<std::string, std::string> explanations;
  std::vector<std::string> warnings;
  std::string error;
};

// Maps raw elements onto the taxonomy. `exclusive_marker` rejects a marker
// mixed with toxic categories (strict schema rule); otherwise the marker is
// dropped in favour of the toxic categories.
Resolved resolve(const std::vector<RawCategory>& raws, const Taxonomy& taxonomy, bool exclusive_marker) {
  Resolved r;
  bool saw_marker = false;
  std::set<std::string> seen;
  for (const RawCategory& raw : raws) {
    const std::string id = text::to_slug(raw.name);
    const CategoryDef* def = taxonomy.find(id);
    if (!def) {
      r.warnings.push_back("unknown category '" + raw.name + "' dropped");
      continue;
    }
    if (!seen.insert(id).second) {
      r.warnings.push_back("duplicate category '" + id + "' ignored");
      continue;
    }
    if (def->is_non_toxic_marker) {
      saw_marker = true;
      continue;
    }
    r.categories.insert(id);
    r.explanations[id] = raw.explanation;
  }
  if (r.categories.empty() && !saw_marker) {
    r.error = "no known category in response";
    return r;
  }
  if (saw_marker && !r.categories.empty()) {
    if (exclusive_marker) {
      r.error = "non-toxic marker combined with toxic categories";
      return r;
    }
    r.warnings.push_back("non-toxic marker dropped: toxic categories present");
  }
  r.ok = true;
  return r;
}

CategoryAssignment to_assignment(Resolved r, std::string_view raw, ParseStatus status) {
  CategoryAssignment a;
  a.raw_response = std::string(raw);
  a.parse_status = status;
  a.warnings = std::move(r.warnings);
  if (status != ParseStatus::kFailed) {
    a.categories = std::move(r.categories);
    a.explanations = std::move(r.explanations);
  }
  return a;
}

}  // namespace

std::string response_schema(const Taxonomy& taxonomy) {
  const std::string& marker = taxonomy.marker().id;
  return "<result>\n"
         "  <category name=\"CATEGORY_ID\">EXPLANATION</category>\n"
         "</result>\n"
         "Write one <category> element per applicable sub-category, with its id in the name attribute and the "
         "explanation as the element text. Escape &, < and > in explanations. If no toxic sub-category applies, "
         "reply exactly with <result><category name=\"" +
         marker + "\">short reason</category></result>.";
}

std::string render_definitions(const Taxonomy& taxonomy) {
  std::string out;
  for (const CategoryDef& def : taxonomy.categories()) {
    out += "- " + def.id + " (" + def.display_name + "): " + def.definition + "\n";
    for (const std::string& example : def.exemplars) out += "  Example: \"" + example + "\"\n";
  }
  if (!out.empty()) out.pop_back();
  return out;
}

CoachPrompt build_coach_prompt(const CommentRecord& comment, const Taxonomy& taxonomy, std::string_view persona,
                               const PromptTemplate& tmpl) {
  validate(comment);
  if (text::is_blank(persona)) throw ValidationError("coach persona is empty");
  const std::map<std::string, std::string, std::less<>> values = {
      {"persona", std::string(text::trim(persona))},
      {"definitions", render_definitions(taxonomy)},
      {"schema", response_schema(taxonomy)},
      {"comment", text::normalize(comment.body)},
  };
  CoachPrompt prompt;
  prompt.taxonomy_version = taxonomy.version();
  prompt.template_version = tmpl.version();
  prompt.messages = {{backend::Role::kSystem, render(tmpl.system_text(), values)},
                     {backend::Role::kUser, render(tmpl.user_text(), values)}};
  for (std::size_t i = 0; i < kProtocolElements.size(); ++i) {
    const std::string_view h = heading(kProtocolElements[i]);
    for (const auto& m : prompt.messages) {
      if (m.content.find(h) != std::string::npos) prompt.protocol_elements.set(i);
    }
  }
  if (!prompt.complete()) throw ConfigError("prompt template '" + tmpl.version() + "' is missing protocol sections");
  return prompt;
}

CategoryAssignment parse_coach_response(std::string_view raw, const Taxonomy& taxonomy, ParseMode mode) {
  std::string strict_error;
  const StrictParse strict = parse_strict(raw);
  if (strict.ok) {
    Resolved r = resolve(strict.categories, taxonomy, /*exclusive_marker=*/true);
    if (r.ok) return to_assignment(std::move(r), raw, ParseStatus::kStrictOk);
    strict_error = r.error;
  } else {
    strict_error = strict.error;
  }

  if (mode == ParseMode::kStrict) {
    Resolved failed = strict.ok ? resolve(strict.categories, taxonomy, true) : Resolved{};
    failed.warnings.push_back("strict parse failed: " + strict_error);
    return to_assignment(std::move(failed), raw, ParseStatus::kFailed);
  }

  Resolved r = resolve(scan_lenient(raw), taxonomy, /*exclusive_marker=*/false);
  if (r.ok) {
    r.warnings.insert(r.warnings.begin(), "strict parse failed: " + strict_error);
    return to_assignment(std::move(r), raw, ParseStatus::kLenientRecovered);
  }
  r.warnings.push_back("strict parse failed: " + strict_error);
  return to_assignment(std::move(r), raw, ParseStatus::kFailed);
}

std::string corrective_instruction(const Taxonomy& taxonomy) {
  return "Your previous reply could not be parsed. Reply again with only the XML document, no other text, "
         "following exactly this schema:\n" +
         response_schema(taxonomy);
}

CategoryAssignment categorize(const CommentRecord& comment, const Taxonomy& taxonomy, const CoachConfig& cfg,
                              const backend::BackendRegistry& registry) {
  const PromptTemplate& tmpl = cfg.prompt_template ? *cfg.prompt_template : PromptTemplate::builtin();
  CoachPrompt prompt = build_coach_prompt(comment, taxonomy, cfg.persona, tmpl);
  backend::DecodingParams params;
  params.temperature = 0.0;
  params.max_tokens = cfg.max_tokens;

  try {
    auto chat = registry.chat(cfg.backend_id);
    std::string reply = chat->complete(prompt.messages, params);
    CategoryAssignment first = parse_coach_response(reply, taxonomy, cfg.parse_mode);
    if (first.parse_status != ParseStatus::kFailed) {
      first.raw_trace = {reply};
      return first;
    }
    std::vector<backend::ChatMessage> retry = prompt.messages;
    retry.push_back({backend::Role::kAssistant, reply});
    retry.push_back({backend::Role::kUser, corrective_instruction(taxonomy)});
    std::string second_reply = chat->complete(retry, params);
    CategoryAssignment second = parse_coach_response(second_reply, taxonomy, cfg.parse_mode);
    second.raw_trace = {reply, second_reply};
    return second;
  } catch (const BackendError& e) {
    throw StageError("coach", e);
  }
}

}  // namespace revguard::coach

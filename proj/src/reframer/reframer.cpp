#include "revguard/reframer/reframer.h"

#include "revguard/core/errors.h"
#include "revguard/core/text.h"

#include <map>
#include <tuple>

namespace revguard::reframer {

namespace {

const std::map<std::string, std::string, std::less<>>& category_guidance() {
  static const std::map<std::string, std::string, std::less<>> guidance = {
      {"profanity", "remove every swear word and vulgar expression; do not mask them with symbols"},
      {"insult", "talk about the code, not the person; drop every judgment of the author's intelligence or skill"},
      {"trolling", "replace sarcasm and mockery with a direct, sincere statement of the concern"},
      {"object_directed",
       "describe concretely what is wrong with the code or tool instead of disparaging it"},
      {"identity_attack", "remove every reference to the person's identity or group"},
      {"threat", "remove threats and ultimatums; state the consequence for the project neutrally if it matters"},
      {"entitlement", "turn demands into a polite request and acknowledge the maintainers' time"},
      {"arrogance", "drop condescension; explain the point as one peer to another"},
      {"self_deprecation", "state the mistake factually without demeaning the author"},
      {"sexual", "remove sexual references entirely"},
      {"flirtation", "remove personal or romantic remarks and keep to the technical topic"},
  };
  return guidance;
}

const metrics::ContentScorer& content_scorer(const ReframeConfig& cfg) {
  static const metrics::BagOfWordsCosine builtin;
  return cfg.content_scorer ? *cfg.content_scorer : builtin;
}

const metrics::FluencyScorer& fluency_scorer(const ReframeConfig& cfg) {
  static const metrics::RuleBasedFluency builtin;
  return cfg.fluency_scorer ? *cfg.fluency_scorer : builtin;
}

std::string between(std::string_view s, std::string_view open, std::string_view close, bool last) {
  const std::size_t start = last ? s.rfind(open) : s.find(open);
  if (start == std::string_view::npos) return {};
  const std::size_t body = start + open.size();
  const std::size_t end = s.find(close, body);
  if (end == std::string_view::npos) return {};
  return std::string(text::trim(s.substr(body, end - body)));
}

}  // namespace

void validate(const ReframeConfig& cfg) {
  if (cfg.backend_id.empty()) throw ConfigError("reframer backend_id is empty");
  if (cfg.max_attempts < 1) throw ConfigError("reframer max_attempts must be >= 1");
  if (!(cfg.fluency_threshold >= 0.0 && cfg.fluency_threshold <= 1.0)) {
    throw ConfigError("reframer fluency_threshold must lie in [0,1]");
  }
  if (!(cfg.similarity_threshold >= 0.0 && cfg.similarity_threshold <= 1.0)) {
    throw ConfigError("reframer similarity_threshold must lie in [0,1]");
  }
  filter::validate(cfg.verification_filter);
}

std::vector<backend::ChatMessage> build_reframe_prompt(const CommentRecord& comment,
                                                       const std::optional<CategoryAssignment>& assignment,
                                                       const Taxonomy* taxonomy,
                                                       const std::optional<std::string>& previous_attempt) {
  const std::string body = text::normalize(comment.body);
  std::string system =
      "You are an experienced open-source maintainer who helps reviewers keep code-review discussions civil. "
      "You rewrite toxic review comments into respectful, constructive ones that keep every technical point.";

  std::string user =
      "Rewrite the code-review comment below so that it is civil and professional while keeping its technical "
      "meaning and intent.\n\n"
      "Think step by step before answering:\n"
      "1. Identify the technical points the reviewer is making.\n"
      "2. Identify the words and phrases that make the comment toxic.\n"
      "3. Write a rewrite that keeps every technical point, drops the toxic parts, and reads naturally.\n"
      "4. Check that the rewrite contains no insults, profanity, sarcasm or hostility.\n\n"
      "Preserve all technical content exactly: identifiers, file names, function names, numbers, links and "
      "code spans must appear verbatim.\n";

  if (assignment && !assignment->categories.empty()) {
    user += "\nThe comment was flagged for these toxicity sub-categories:\n";
    for (const std::string& id : assignment->categories) {
      std::string name = id;
      if (taxonomy) {
        if (const CategoryDef* def = taxonomy->find(id)) name = def->display_name;
      }
      user += "- " + name;
      if (auto it = category_guidance().find(id); it != category_guidance().end()) user += ": " + it->second;
      if (auto ex = assignment->explanations.find(id); ex != assignment->explanations.end() && !ex->second.empty()) {
        user += " (flagged because: " + ex->second + ")";
      }
      user += "\n";
    }
  }

  const auto spans = text::find_code_spans(body);
  if (!spans.empty()) {
    user += "\nKeep these code spans exactly as written, character for character:\n";
    for (const text::CodeSpan& span : spans) user += span.text + "\n";
  }

  user +=
      "\nReply in this format:\n<reasoning>your step-by-step analysis</reasoning>\n<rewrite>the rewritten "
      "comment only</rewrite>\n\nComment:\n<comment>\n" +
      body + "\n</comment>";

  std::vector<backend::ChatMessage> messages = {{backend::Role::kSystem, std::move(system)},
                                                {backend::Role::kUser, std::move(user)}};
  if (previous_attempt) {
    messages.push_back({backend::Role::kAssistant, *previous_attempt});
    messages.push_back(
        {backend::Role::kUser,
         "That rewrite was rejected: it is still toxic or it changed a code span. Rewrite the original comment "
         "again. Remove every insulting, profane, sarcastic or hostile word, keep all code spans verbatim, and use "
         "the same reply format."});
  }
  return messages;
}

ParsedRewrite parse_rewrite_reply(std::string_view reply) {
  ParsedRewrite out;
  out.rationale = between(reply, "<reasoning>", "</reasoning>", false);
  out.rewrite = between(reply, "<rewrite>", "</rewrite>", true);
  if (out.rewrite.empty()) {
    if (std::size_t end = reply.rfind("</reasoning>"); end != std::string_view::npos) {
      out.rewrite = std::string(text::trim(reply.substr(end + 12)));
    } else if (reply.find("<rewrite>") == std::string_view::npos) {
      out.rewrite = std::string(text::trim(reply));
    }
  }
  return out;
}

bool code_spans_preserved(std::string_view original, std::string_view rewritten) {
  const std::string target = text::normalize(rewritten);
  for (const text::CodeSpan& span : text::find_code_spans(text::normalize(original))) {
    if (target.find(span.text) == std::string::npos) return false;
  }
  return true;
}

Verification verify_rewrite(std::string_view original, std::string_view rewritten, const ReframeConfig& cfg,
                            const backend::BackendRegistry& registry) {
  if (text::is_blank(original)) throw ValidationError("original text is blank");
  if (text::is_blank(rewritten)) throw ValidationError("rewritten text is blank");
  Verification v;
  v.style_pass = !filter::classify_text(rewritten, cfg.verification_filter, registry).toxic();
  v.fluency = fluency_scorer(cfg).fluency(rewritten);
  v.similarity = content_scorer(cfg).similarity(original, rewritten);
  v.code_preserved = !cfg.preserve_code || code_spans_preserved(original, rewritten);
  return v;
}

ReframeTrace reframe_traced(const CommentRecord& comment, const std::optional<CategoryAssignment>& assignment,
                            const ReframeConfig& cfg, const backend::BackendRegistry& registry,
                            const std::optional<Verdict>& stage1, const Taxonomy* taxonomy) {
  validate(cfg);
  validate(comment);
  const Verdict verdict = stage1 ? *stage1 : filter::classify(comment, cfg.verification_filter, registry);
  if (!verdict.toxic()) throw ValidationError("reframe requires a comment judged toxic; '" + comment.id + "' is not");

  std::shared_ptr<backend::ChatBackend> chat;
  try {
    chat = registry.chat(cfg.backend_id);
  } catch (const BackendError& e) {
    throw StageError("reframer", e);
  }
  backend::DecodingParams params;
  params.max_tokens = cfg.max_tokens;

  ReframeTrace trace;
  std::optional<RewriteResult> best;
  std::optional<std::string> previous;
  auto rank = [](const RewriteResult& r) { return std::make_tuple(r.style_pass, r.code_preserved, r.content_similarity); };

  for (int attempt = 1; attempt <= cfg.max_attempts; ++attempt) {
    const auto messages = build_reframe_prompt(comment, assignment, taxonomy, previous);
    std::string reply;
    try {
      reply = chat->complete(messages, params);
    } catch (const BackendError& e) {
      throw StageError("reframer", e);
    }
    trace.attempt_texts.push_back(reply);
    previous = reply;
    const ParsedRewrite parsed = parse_rewrite_reply(reply);
    if (text::is_blank(parsed.rewrite)) continue;

    const Verification v = verify_rewrite(comment.body, parsed.rewrite, cfg, registry);
    RewriteResult candidate;
    candidate.original = comment.body;
    candidate.rewritten = parsed.rewrite;
    candidate.rationale = parsed.rationale;
    candidate.style_pass = v.style_pass;
    candidate.code_preserved = v.code_preserved;
    candidate.fluency_score = v.fluency;
    candidate.content_similarity = v.similarity;
    if (!best || rank(candidate) > rank(*best)) best = candidate;
    if (v.style_pass && v.code_preserved) break;
  }

  if (!best) {
    throw EmptyRewriteError(std::move(trace.attempt_texts));
  }
  best->attempts = static_cast<int>(trace.attempt_texts.size());
  trace.result = std::move(*best);
  return trace;
}

RewriteResult reframe(const CommentRecord& comment, const std::optional<CategoryAssignment>& assignment,
                      const ReframeConfig& cfg, const backend::BackendRegistry& registry,
                      const std::optional<Verdict>& stage1, const Taxonomy* taxonomy) {
  return reframe_traced(comment, assignment, cfg, registry, stage1, taxonomy).result;
}

}  // namespace revguard::reframer

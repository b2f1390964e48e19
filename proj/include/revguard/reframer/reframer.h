#pragma once

#include "revguard/backend/backend.h"
#include "revguard/backend/registry.h"
#include "revguard/core/errors.h"
#include "revguard/core/taxonomy.h"
#include "revguard/core/types.h"
#include "revguard/filter/toxicity_filter.h"
#include "revguard/metrics/scorers.h"

#include <memory>
#include <optional>

namespace revguard::reframer {

struct ReframeConfig {
  std::string backend_id;
  int max_attempts = 3;  // first try plus two escalated retries
  double fluency_threshold = 0.5;
  double similarity_threshold = 0.2;
  filter::FilterConfig verification_filter;
  // Require every code span of the original to survive verbatim.
  bool preserve_code = true;
  int max_tokens = 1024;
  // Built-in scorers when null.
  std::shared_ptr<const metrics::ContentScorer> content_scorer;
  std::shared_ptr<const metrics::FluencyScorer> fluency_scorer;
};

void validate(const ReframeConfig& cfg);

struct Verification {
  bool style_pass = false;
  double fluency = 0.0;
  double similarity = 0.0;
  bool code_preserved = true;
};

// Chat messages asking for a step-by-step civil rewrite. Detected
// categories (when present) become targeted guidance; code spans are listed
// for verbatim retention. `previous_attempt`, when set, adds an escalated
// instruction quoting the rejected rewrite.
std::vector<backend::ChatMessage> build_reframe_prompt(const CommentRecord& comment,
                                                       const std::optional<CategoryAssignment>& assignment,
                                                       const Taxonomy* taxonomy = nullptr,
                                                       const std::optional<std::string>& previous_attempt = std::nullopt);

struct ParsedRewrite {
  std::string rewrite;
  std::string rationale;
};

// Extracts <rewrite>...</rewrite> (last occurrence) and <reasoning>; falls
// back to the text after </reasoning>, then to the whole reply.
ParsedRewrite parse_rewrite_reply(std::string_view reply);

// True when every code span of `original` occurs verbatim in `rewritten`.
bool code_spans_preserved(std::string_view original, std::string_view rewritten);

// Throws ValidationError when either text is blank. style_pass is the
// verification filter's non_toxic verdict on the rewrite.
Verification verify_rewrite(std::string_view original, std::string_view rewritten, const ReframeConfig& cfg,
                            const backend::BackendRegistry& registry);

// Every attempt came back without a usable <rewrite>.
class EmptyRewriteError : public StageError {
 public:
  explicit EmptyRewriteError(std::vector<std::string> attempts)
      : StageError("reframer", BackendError(BackendErrorKind::kProtocol, "backend produced no usable rewrite")),
        attempts_(std::move(attempts)) {}
  const std::vector<std::string>& attempts() const { return attempts_; }

 private:
  std::vector<std::string> attempts_;
};

struct ReframeTrace {
  RewriteResult result;
  std::vector<std::string> attempt_texts;  // raw replies, one per attempt
};

// Rewrites a toxic comment, verifying each attempt and retrying with an
// escalated instruction while the rewrite is still flagged (or dropped a
// code span), up to cfg.max_attempts. Returns the best attempt ordered by
// (style_pass, code_preserved, similarity).
//
// A non-toxic comment is a ValidationError. The comment is classified with
// cfg.verification_filter unless `stage1` is supplied. Backend failures are
// rethrown as StageError tagged "reframer"; EmptyRewriteError when no
// attempt yields a rewrite.
ReframeTrace reframe_traced(const CommentRecord& comment, const std::optional<CategoryAssignment>& assignment,
                            const ReframeConfig& cfg, const backend::BackendRegistry& registry,
                            const std::optional<Verdict>& stage1 = std::nullopt, const Taxonomy* taxonomy = nullptr);

RewriteResult reframe(const CommentRecord& comment, const std::optional<CategoryAssignment>& assignment,
                      const ReframeConfig& cfg, const backend::BackendRegistry& registry,
                      const std::optional<Verdict>& stage1 = std::nullopt, const Taxonomy* taxonomy = nullptr);

}  // namespace revguard::reframer

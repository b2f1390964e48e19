#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace revguard {

// A code-review comment and its provenance. The unit flowing through the
// pipeline.
struct CommentRecord {
  std::string id;
  std::string body;
  std::optional<std::string> source;
  std::optional<std::string> author;
  std::optional<std::string> created_at;  // ISO-8601 UTC
  std::optional<std::string> context;

  bool operator==(const CommentRecord&) const = default;
};

// Throws ValidationError if the id is empty or the body is blank.
void validate(const CommentRecord& comment);

enum class Label { kToxic, kNonToxic };

std::string_view to_string(Label label);
Label parse_label(std::string_view s);  // accepts "toxic"/"non_toxic" (also "1"/"0")

struct Verdict {
  Label label = Label::kNonToxic;
  double confidence = 0.0;
  double threshold = 0.5;
  std::string backend_id;
  std::int64_t latency_ms = 0;
  bool cached = false;

  bool toxic() const { return label == Label::kToxic; }
  bool operator==(const Verdict&) const = default;
};

enum class ParseStatus { kStrictOk, kLenientRecovered, kFailed };

std::string_view to_string(ParseStatus status);
ParseStatus parse_parse_status(std::string_view s);

// Sub-categories assigned by the coach. `categories` never contains the
// non-toxic marker; it is empty when the marker was the sole label or when
// parsing failed.
struct CategoryAssignment {
  std::set<std::string> categories;
  std::map<std::string, std::string> explanations;
  std::string raw_response;
  ParseStatus parse_status = ParseStatus::kFailed;
  std::vector<std::string> warnings;
  // Every model response seen, in order, including corrective retries.
  std::vector<std::string> raw_trace;

  bool operator==(const CategoryAssignment&) const = default;
};

struct RewriteResult {
  std::string original;
  std::string rewritten;
  std::string rationale;
  bool style_pass = false;
  bool code_preserved = true;
  double fluency_score = 0.0;
  double content_similarity = 0.0;
  int attempts = 0;

  bool operator==(const RewriteResult&) const = default;
};

struct PipelineOutcome {
  std::string comment_id;
  Verdict verdict;
  std::optional<CategoryAssignment> assignment;
  std::optional<RewriteResult> rewrite;
  std::map<std::string, std::int64_t> stage_timings;  // stage -> ms

  // Non-toxic verdicts carry neither an assignment nor a rewrite.
  bool short_circuit_holds() const { return verdict.toxic() || (!assignment && !rewrite); }
};

}  // namespace revguard

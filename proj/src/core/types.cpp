#include "revguard/core/types.h"

#include "revguard/core/errors.h"
#include "revguard/core/text.h"

namespace revguard {

void validate(const CommentRecord& comment) {
  if (comment.id.empty()) throw ValidationError("comment id is empty");
  if (text::is_blank(comment.body)) throw ValidationError("comment '" + comment.id + "' has a blank body");
}

std::string_view to_string(Label label) { return label == Label::kToxic ? "toxic" : "non_toxic"; }

Label parse_label(std::string_view s) {
  const std::string slug = text::to_slug(s);
  if (slug == "toxic" || slug == "1") return Label::kToxic;
  if (slug == "non_toxic" || slug == "nontoxic" || slug == "0") return Label::kNonToxic;
  throw ValidationError("unknown label '" + std::string(s) + "'");
}

std::string_view to_string(ParseStatus status) {
  switch (status) {
    case ParseStatus::kStrictOk: return "strict_ok";
    case ParseStatus::kLenientRecovered: return "lenient_recovered";
    case ParseStatus::kFailed: return "failed";
  }
  return "failed";
}

ParseStatus parse_parse_status(std::string_view s) {
  if (s == "strict_ok") return ParseStatus::kStrictOk;
  if (s == "lenient_recovered") return ParseStatus::kLenientRecovered;
  if (s == "failed") return ParseStatus::kFailed;
  throw ValidationError("unknown parse status '" + std::string(s) + "'");
}

}  // namespace revguard

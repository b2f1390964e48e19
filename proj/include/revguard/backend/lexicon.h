#pragma once

#include "revguard/backend/backend.h"

#include <string>
#include <string_view>
#include <vector>

namespace revguard::backend {

struct LexiconTerm {
  std::string term;  // stored in lexicon-normalized form
  double weight = 0.5;
};

class Lexicon {
 public:
  // Terms are normalized; duplicates keep the largest weight. Throws
  // ConfigError on an empty term list or a weight outside (0,1].
  explicit Lexicon(std::vector<LexiconTerm> terms);

  // Tab- or comma-separated "term<TAB>weight" lines; '#' starts a comment.
  static Lexicon parse(std::string_view text);
  static Lexicon load_file(const std::string& path);

  // Built-in profanity/insult list.
  static const Lexicon& builtin();

  const std::vector<LexiconTerm>& terms() const { return terms_; }

 private:
  std::vector<LexiconTerm> terms_;
};

// NFC + newline normalization, ASCII lowercasing, and every ASCII
// non-alphanumeric byte turned into a single space. Identifiers such as
// "is_disgusting_for" split into their words. Idempotent.
std::string lexicon_normalize(std::string_view text);

// Distinct lexicon terms found in `text` as whole-token sequences.
std::vector<LexiconTerm> matched_terms(std::string_view text, const Lexicon& lexicon);

// 1 - prod(1 - w_i) over the weights of distinct matched terms. 0 when
// nothing matches; non-decreasing as matches are added; at most 1.
double classify_lexicon(std::string_view text, const Lexicon& lexicon);

class LexiconScorer final : public ScoringBackend {
 public:
  explicit LexiconScorer(Lexicon lexicon, std::string id = "lexicon");

  const std::string& id() const override { return id_; }
  double score(std::string_view text) override { return classify_lexicon(text, lexicon_); }

 private:
  Lexicon lexicon_;
  std::string id_;
};

}  // namespace revguard::backend

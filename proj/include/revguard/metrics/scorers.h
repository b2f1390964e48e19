#pragma once

#include <map>
#include <string>
#include <string_view>

namespace revguard::metrics {

// Similarity between a source text and its rewrite, in [0,1].
class ContentScorer {
 public:
  virtual ~ContentScorer() = default;
  virtual std::string name() const = 0;
  virtual double similarity(std::string_view source, std::string_view rewrite) const = 0;
};

// Well-formedness of a text, in [0,1].
class FluencyScorer {
 public:
  virtual ~FluencyScorer() = default;
  virtual std::string name() const = 0;
  virtual double fluency(std::string_view text) const = 0;
};

// Cosine similarity of word-frequency vectors. Prose is lowercased and split
// on non-identifier characters, stop words are dropped; code spans are kept
// verbatim as single tokens. Identical texts score 1.
class BagOfWordsCosine final : public ContentScorer {
 public:
  std::string name() const override { return "bow_cosine"; }
  double similarity(std::string_view source, std::string_view rewrite) const override;

  static std::map<std::string, double> term_frequencies(std::string_view text);
  static bool is_stop_word(std::string_view word);
};

// Rule-based stand-in for a language-model fluency judge:
//   0.8 * (share of prose words that look like real words)
// + 0.2 * (sentence-boundary sanity: capitalized start, terminal
//          punctuation, balanced brackets)
// Code spans are ignored for the word share.
class RuleBasedFluency final : public FluencyScorer {
 public:
  std::string name() const override { return "rule_fluency"; }
  double fluency(std::string_view text) const override;

  static bool plausible_word(std::string_view word);
};

}  // namespace revguard::metrics

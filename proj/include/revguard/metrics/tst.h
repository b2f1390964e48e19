#pragma once

#include "revguard/metrics/scorers.h"

#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace revguard::metrics {

// A (toxic source, rewrite) pair under evaluation.
struct TextPair {
  std::string source;
  std::string target;
};

// Per-pair style/content/fluency values.
struct TstRecord {
  bool acc = false;  // rewrite judged non-toxic
  double sim = 0.0;  // content similarity to the source
  double flu = 0.0;  // fluency of the rewrite

  double joint() const { return (acc ? 1.0 : 0.0) * sim * flu; }
};

struct TstEval {
  std::vector<TstRecord> records;
  double sta = 0.0;
  double cp = 0.0;
  double fluency = 0.0;
  double j = 0.0;  // mean of per-pair acc * sim * flu
};

// Returns true when the text is judged non-toxic.
using StyleJudge = std::function<bool(std::string_view)>;

// Aggregates per-pair records. Throws ValidationError on an empty list or a
// sim/flu value outside [0,1].
TstEval aggregate_tst(std::span<const TstRecord> records);

TstEval evaluate_tst(std::span<const TextPair> pairs, const StyleJudge& judge, const ContentScorer& cp,
                     const FluencyScorer& flu);

double sta(std::span<const TextPair> pairs, const StyleJudge& judge);
double content_preservation(std::span<const TextPair> pairs, const ContentScorer& scorer);
double fluency(std::span<const TextPair> pairs, const FluencyScorer& scorer);
double j_score(std::span<const TextPair> pairs, const StyleJudge& judge, const ContentScorer& cp,
               const FluencyScorer& flu);

}  // namespace revguard::metrics

#pragma once

#include "revguard/backend/registry.h"
#include "revguard/core/types.h"
#include "revguard/metrics/tst.h"

#include <span>
#include <string_view>
#include <utility>

namespace revguard::filter {

struct FilterConfig {
  std::string backend_id = "lexicon";
  double threshold = 0.5;
  // Replace fenced and inline code with a neutral token before scoring.
  bool normalize_code_spans = true;
};

void validate(const FilterConfig& cfg);

inline constexpr std::string_view kCodePlaceholder = "[code]";

// toxic iff confidence >= threshold.
Label label_for(double confidence, double threshold);

// Text actually sent to the scorer: normalized, code spans replaced when
// configured.
std::string prepare_text(std::string_view body, const FilterConfig& cfg);

// Scores the comment body and applies the threshold rule. Backend failures
// are rethrown as StageError tagged "filter".
Verdict classify(const CommentRecord& comment, const FilterConfig& cfg, const backend::BackendRegistry& registry);
Verdict classify_text(std::string_view body, const FilterConfig& cfg, const backend::BackendRegistry& registry);

using ScoredLabel = std::pair<double, Label>;

// Grid threshold (multiples of grid_step in [0,1]) maximizing toxic-class F1
// over already-scored items; ties go to the larger threshold.
double calibrate_threshold_scores(std::span<const ScoredLabel> scored, double grid_step);

// Scores each comment through the configured backend, then calibrates.
double calibrate_threshold(std::span<const std::pair<CommentRecord, Label>> labeled, const FilterConfig& cfg,
                           const backend::BackendRegistry& registry, double grid_step);

// Style judge for TST metrics: true when the filter says non_toxic.
metrics::StyleJudge make_style_judge(const FilterConfig& cfg, const backend::BackendRegistry& registry);

double sta(std::span<const metrics::TextPair> pairs, const FilterConfig& cfg, const backend::BackendRegistry& registry);

}  // namespace revguard::filter

#include "revguard/filter/toxicity_filter.h"

#include "revguard/core/errors.h"
#include "revguard/core/text.h"
#include "revguard/metrics/classification.h"

#include <chrono>
#include <cmath>
#include <vector>

namespace revguard::filter {

void validate(const FilterConfig& cfg) {
  if (cfg.backend_id.empty()) throw ConfigError("filter backend_id is empty");
  if (!(cfg.threshold >= 0.0 && cfg.threshold <= 1.0)) throw ConfigError("filter threshold must lie in [0,1]");
}

Label label_for(double confidence, double threshold) {
  return confidence >= threshold ? Label::kToxic : Label::kNonToxic;
}

std::string prepare_text(std::string_view body, const FilterConfig& cfg) {
  std::string normalized = text::normalize(body);
  if (cfg.normalize_code_spans) normalized = text::replace_code_spans(normalized, kCodePlaceholder);
  return normalized;
}

Verdict classify_text(std::string_view body, const FilterConfig& cfg, const backend::BackendRegistry& registry) {
  validate(cfg);
  if (text::is_blank(body)) throw ValidationError("cannot classify a blank comment");
  const auto start = std::chrono::steady_clock::now();
  double confidence = 0.0;
  try {
    confidence = registry.scorer(cfg.backend_id)->score(prepare_text(body, cfg));
  } catch (const BackendError& e) {
    throw StageError("filter", e);
  }
  if (!(confidence >= 0.0 && confidence <= 1.0)) {
    throw StageError("filter", BackendError(BackendErrorKind::kProtocol, "classifier score outside [0,1]"));
  }
  Verdict v;
  v.confidence = confidence;
  v.threshold = cfg.threshold;
  v.label = label_for(confidence, cfg.threshold);
  v.backend_id = cfg.backend_id;
  v.latency_ms =
      std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start).count();
  return v;
}

Verdict classify(const CommentRecord& comment, const FilterConfig& cfg, const backend::BackendRegistry& registry) {
  validate(comment);
  return classify_text(comment.body, cfg, registry);
}

double calibrate_threshold_scores(std::span<const ScoredLabel> scored, double grid_step) {
  if (!(grid_step > 0.0 && grid_step <= 0.5)) throw ValidationError("grid_step must lie in (0, 0.5]");
  bool has_toxic = false, has_clean = false;
  for (const auto& [score, label] : scored) {
    (label == Label::kToxic ? has_toxic : has_clean) = true;
  }
  if (!has_toxic || !has_clean) throw ValidationError("calibration needs both toxic and non-toxic examples");

  // Grid points are k/n when 1/step is an integer, so 0.8 is exactly 16/20.
  const double inverse = 1.0 / grid_step;
  const bool integral = std::fabs(inverse - std::round(inverse)) < 1e-9;
  const long steps = integral ? std::lround(inverse) : static_cast<long>(std::floor(inverse));
  auto grid_point = [&](long k) { return integral ? static_cast<double>(k) / static_cast<double>(steps) : k * grid_step; };

  double best_threshold = 0.0;
  double best_f1 = -1.0;
  for (long k = 0; k <= steps; ++k) {
    const double t = grid_point(k);
    metrics::ConfusionCounts c;
    for (const auto& [score, label] : scored) {
      const bool predicted = label_for(score, t) == Label::kToxic;
      const bool gold = label == Label::kToxic;
      if (gold && predicted) ++c.tp;
      else if (!gold && predicted) ++c.fp;
      else if (gold) ++c.fn;
      else ++c.tn;
    }
    const double f1 = metrics::precision_recall_f1(c).f1;
    if (f1 >= best_f1) {
      best_f1 = f1;
      best_threshold = t;
    }
  }
  return best_threshold;
}

double calibrate_threshold(std::span<const std::pair<CommentRecord, Label>> labeled, const FilterConfig& cfg,
                           const backend::BackendRegistry& registry, double grid_step) {
  std::vector<ScoredLabel> scored;
  scored.reserve(labeled.size());
  for (const auto& [comment, label] : labeled) scored.emplace_back(classify(comment, cfg, registry).confidence, label);
  return calibrate_threshold_scores(scored, grid_step);
}

metrics::StyleJudge make_style_judge(const FilterConfig& cfg, const backend::BackendRegistry& registry) {
  return [cfg, &registry](std::string_view text) { return !classify_text(text, cfg, registry).toxic(); };
}

double sta(std::span<const metrics::TextPair> pairs, const FilterConfig& cfg,
           const backend::BackendRegistry& registry) {
  return metrics::sta(pairs, make_style_judge(cfg, registry));
}

}  // namespace revguard::filter

#include "revguard/metrics/classification.h"

#include "revguard/core/errors.h"

#include <algorithm>
#include <cmath>

namespace revguard::metrics {

namespace {

void require_valid(const ConfusionCounts& c) {
  if (c.tp < 0 || c.fp < 0 || c.fn < 0 || c.tn < 0) throw ValidationError("confusion counts must be non-negative");
  if (c.total() == 0) throw ValidationError("confusion counts are all zero");
}

double ratio_or_zero(std::int64_t num, std::int64_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

ConfusionCounts& ConfusionCounts::operator+=(const ConfusionCounts& o) {
  tp += o.tp;
  fp += o.fp;
  fn += o.fn;
  tn += o.tn;
  return *this;
}

PrecisionRecallF1 precision_recall_f1(const ConfusionCounts& c) {
  require_valid(c);
  PrecisionRecallF1 out;
  out.precision = ratio_or_zero(c.tp, c.tp + c.fp);
  out.recall = ratio_or_zero(c.tp, c.tp + c.fn);
  const double sum = out.precision + out.recall;
  out.f1 = sum == 0.0 ? 0.0 : 2.0 * out.precision * out.recall / sum;
  return out;
}

double mcc(const ConfusionCounts& c) {
  require_valid(c);
  const long double tp = c.tp, fp = c.fp, fn = c.fn, tn = c.tn;
  const long double a = tp + fp, b = tp + fn, d = tn + fp, e = tn + fn;
  if (a == 0 || b == 0 || d == 0 || e == 0) return 0.0;
  const long double num = tp * tn - fp * fn;
  const long double den = std::sqrt(a * b) * std::sqrt(d * e);
  return std::clamp(static_cast<double>(num / den), -1.0, 1.0);
}

ConfusionCounts confusion_from_labels(std::span<const bool> gold, std::span<const bool> predicted) {
  if (gold.size() != predicted.size()) throw ValidationError("gold and predicted label lists differ in length");
  ConfusionCounts c;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    if (gold[i] && predicted[i]) ++c.tp;
    else if (!gold[i] && predicted[i]) ++c.fp;
    else if (gold[i] && !predicted[i]) ++c.fn;
    else ++c.tn;
  }
  return c;
}

MultiLabelEval build_multilabel_eval(std::span<const std::set<std::string>> gold,
                                     std::span<const std::set<std::string>> predicted,
                                     const std::vector<std::string>& categories, const std::string& empty_label) {
  if (gold.size() != predicted.size()) throw ValidationError("gold and predicted label sets differ in length");
  if (categories.empty()) throw ValidationError("multi-label evaluation needs at least one category");
  const std::set<std::string> known(categories.begin(), categories.end());
  if (!empty_label.empty() && !known.count(empty_label)) {
    throw ValidationError("empty-set label '" + empty_label + "' is not a category");
  }

  auto effective = [&](const std::set<std::string>& labels) {
    for (const std::string& l : labels) {
      if (!known.count(l)) throw ValidationError("label '" + l + "' is not a category");
    }
    if (labels.empty() && !empty_label.empty()) return std::set<std::string>{empty_label};
    return labels;
  };

  MultiLabelEval m;
  m.sample_count = gold.size();
  for (const std::string& cat : categories) m.per_category[cat];
  for (std::size_t i = 0; i < gold.size(); ++i) {
    const auto g = effective(gold[i]);
    const auto p = effective(predicted[i]);
    for (auto& [cat, counts] : m.per_category) {
      const bool in_g = g.count(cat) > 0;
      const bool in_p = p.count(cat) > 0;
      if (in_g && in_p) ++counts.tp;
      else if (!in_g && in_p) ++counts.fp;
      else if (in_g && !in_p) ++counts.fn;
      else ++counts.tn;
    }
  }
  return m;
}

double macro_f1(const MultiLabelEval& m) {
  if (m.per_category.empty()) throw ValidationError("macro_f1 needs at least one category");
  std::vector<double> values;
  for (const auto& [cat, counts] : m.per_category) values.push_back(precision_recall_f1(counts).f1);
  return stable_mean(std::move(values));
}

double macro_mcc(const MultiLabelEval& m) {
  if (m.per_category.empty()) throw ValidationError("macro_mcc needs at least one category");
  std::vector<double> values;
  for (const auto& [cat, counts] : m.per_category) values.push_back(mcc(counts));
  return stable_mean(std::move(values));
}

double stable_mean(std::vector<double> values) {
  if (values.empty()) throw ValidationError("mean of an empty list");
  // Ascending order plus plain recursive summation: rounding is monotone, so
  // elementwise x_i <= y_i implies mean(x) <= mean(y) exactly.
  std::sort(values.begin(), values.end());
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum / static_cast<double>(values.size());
}

}  // namespace revguard::metrics

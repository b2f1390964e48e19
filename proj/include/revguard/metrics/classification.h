#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

namespace revguard::metrics {

struct ConfusionCounts {
  std::int64_t tp = 0;
  std::int64_t fp = 0;
  std::int64_t fn = 0;
  std::int64_t tn = 0;

  std::int64_t total() const { return tp + fp + fn + tn; }
  ConfusionCounts& operator+=(const ConfusionCounts& o);
  bool operator==(const ConfusionCounts&) const = default;
};

struct PrecisionRecallF1 {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

// Any 0/0 component is 0. Throws ValidationError when total() == 0 or a
// count is negative.
PrecisionRecallF1 precision_recall_f1(const ConfusionCounts& c);

// Matthews correlation in [-1, 1]; 0 when any marginal factor is zero.
double mcc(const ConfusionCounts& c);

// Binary confusion counts from aligned gold/predicted labels (true = positive).
ConfusionCounts confusion_from_labels(std::span<const bool> gold, std::span<const bool> predicted);

// Per-category confusion counts for multi-label data.
struct MultiLabelEval {
  std::map<std::string, ConfusionCounts> per_category;
  std::size_t sample_count = 0;
};

// Counts per category over aligned label sets. `categories` fixes the key
// set; labels outside it throw ValidationError. When `empty_label` is
// non-empty, an item with no labels is counted as carrying `empty_label`.
MultiLabelEval build_multilabel_eval(std::span<const std::set<std::string>> gold,
                                     std::span<const std::set<std::string>> predicted,
                                     const std::vector<std::string>& categories,
                                     const std::string& empty_label = {});

double macro_f1(const MultiLabelEval& m);
double macro_mcc(const MultiLabelEval& m);

// Permutation-invariant mean: sorts a copy, then sums in ascending order.
double stable_mean(std::vector<double> values);

}  // namespace revguard::metrics

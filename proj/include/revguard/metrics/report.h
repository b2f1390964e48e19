#pragma once

#include "revguard/metrics/classification.h"

#include <json.hpp>

#include <string>
#include <utility>
#include <vector>

namespace revguard::metrics {

struct ClassRow {
  std::string id;
  ConfusionCounts counts;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double mcc = 0.0;
};

struct MetricReport {
  std::string mode;  // binary | multiclass | tst
  std::size_t sample_count = 0;
  std::vector<std::pair<std::string, double>> scalars;  // in display order
  std::vector<ClassRow> per_class;

  double scalar(const std::string& name) const;  // throws ValidationError if absent
};

ClassRow make_class_row(std::string id, const ConfusionCounts& counts);

// One JSON object; `per_class` present only when non-empty.
nlohmann::json to_json(const MetricReport& report);

// Fixed-width text table for terminals.
std::string render_table(const MetricReport& report);

}  // namespace revguard::metrics

#include "revguard/metrics/report.h"

#include "revguard/core/errors.h"

#include <cstdio>
#include <sstream>

namespace revguard::metrics {

double MetricReport::scalar(const std::string& name) const {
  for (const auto& [key, value] : scalars) {
    if (key == name) return value;
  }
  throw ValidationError("report has no metric '" + name + "'");
}

ClassRow make_class_row(std::string id, const ConfusionCounts& counts) {
  const PrecisionRecallF1 prf = precision_recall_f1(counts);
  return {std::move(id), counts, prf.precision, prf.recall, prf.f1, mcc(counts)};
}

nlohmann::json to_json(const MetricReport& report) {
  nlohmann::json metrics = nlohmann::json::object();
  for (const auto& [key, value] : report.scalars) metrics[key] = value;
  nlohmann::json j = {{"mode", report.mode}, {"samples", report.sample_count}, {"metrics", metrics}};
  if (!report.per_class.empty()) {
    nlohmann::json rows = nlohmann::json::array();
    for (const ClassRow& r : report.per_class) {
      rows.push_back({{"id", r.id},
                      {"tp", r.counts.tp},
                      {"fp", r.counts.fp},
                      {"fn", r.counts.fn},
                      {"tn", r.counts.tn},
                      {"precision", r.precision},
                      {"recall", r.recall},
                      {"f1", r.f1},
                      {"mcc", r.mcc}});
    }
    j["per_class"] = std::move(rows);
  }
  return j;
}

std::string render_table(const MetricReport& report) {
  std::ostringstream out;
  char line[256];
  out << "mode: " << report.mode << "  samples: " << report.sample_count << "\n";
  for (const auto& [key, value] : report.scalars) {
    std::snprintf(line, sizeof line, "  %-22s %10.4f\n", key.c_str(), value);
    out << line;
  }
  if (!report.per_class.empty()) {
    std::snprintf(line, sizeof line, "\n  %-24s %6s %6s %6s %6s %8s %8s %8s %8s\n", "category", "tp", "fp", "fn", "tn",
                  "prec", "recall", "f1", "mcc");
    out << line;
    for (const ClassRow& r : report.per_class) {
      std::snprintf(line, sizeof line, "  %-24s %6lld %6lld %6lld %6lld %8.4f %8.4f %8.4f %8.4f\n", r.id.c_str(),
                    static_cast<long long>(r.counts.tp), static_cast<long long>(r.counts.fp),
                    static_cast<long long>(r.counts.fn), static_cast<long long>(r.counts.tn), r.precision, r.recall,
                    r.f1, r.mcc);
      out << line;
    }
  }
  return out.str();
}

}  // namespace revguard::metrics

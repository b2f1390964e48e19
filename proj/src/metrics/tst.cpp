#include "revguard/metrics/tst.h"

#include "revguard/core/errors.h"
#include "revguard/metrics/classification.h"

namespace revguard::metrics {

namespace {

void require_pairs(std::span<const TextPair> pairs) {
  if (pairs.empty()) throw ValidationError("TST evaluation needs at least one pair");
}

void require_unit(double v, const char* what) {
  if (!(v >= 0.0 && v <= 1.0)) throw ValidationError(std::string(what) + " value outside [0,1]");
}

}  // namespace

TstEval aggregate_tst(std::span<const TstRecord> records) {
  if (records.empty()) throw ValidationError("TST evaluation needs at least one pair");
  std::vector<double> acc, sim, flu, joint;
  acc.reserve(records.size());
  sim.reserve(records.size());
  flu.reserve(records.size());
  joint.reserve(records.size());
  for (const TstRecord& r : records) {
    require_unit(r.sim, "similarity");
    require_unit(r.flu, "fluency");
    acc.push_back(r.acc ? 1.0 : 0.0);
    sim.push_back(r.sim);
    flu.push_back(r.flu);
    joint.push_back(r.joint());
  }
  TstEval eval;
  eval.records.assign(records.begin(), records.end());
  eval.sta = stable_mean(std::move(acc));
  eval.cp = stable_mean(std::move(sim));
  eval.fluency = stable_mean(std::move(flu));
  eval.j = stable_mean(std::move(joint));
  return eval;
}

TstEval evaluate_tst(std::span<const TextPair> pairs, const StyleJudge& judge, const ContentScorer& cp,
                     const FluencyScorer& flu) {
  require_pairs(pairs);
  std::vector<TstRecord> records;
  records.reserve(pairs.size());
  for (const TextPair& p : pairs) {
    records.push_back({judge(p.target), cp.similarity(p.source, p.target), flu.fluency(p.target)});
  }
  return aggregate_tst(records);
}

double sta(std::span<const TextPair> pairs, const StyleJudge& judge) {
  require_pairs(pairs);
  std::vector<double> acc;
  for (const TextPair& p : pairs) acc.push_back(judge(p.target) ? 1.0 : 0.0);
  return stable_mean(std::move(acc));
}

double content_preservation(std::span<const TextPair> pairs, const ContentScorer& scorer) {
  require_pairs(pairs);
  std::vector<double> sims;
  for (const TextPair& p : pairs) {
    const double s = scorer.similarity(p.source, p.target);
    require_unit(s, "similarity");
    sims.push_back(s);
  }
  return stable_mean(std::move(sims));
}

double fluency(std::span<const TextPair> pairs, const FluencyScorer& scorer) {
  require_pairs(pairs);
  std::vector<double> values;
  for (const TextPair& p : pairs) {
    const double f = scorer.fluency(p.target);
    require_unit(f, "fluency");
    values.push_back(f);
  }
  return stable_mean(std::move(values));
}

double j_score(std::span<const TextPair> pairs, const StyleJudge& judge, const ContentScorer& cp,
               const FluencyScorer& flu) {
  return evaluate_tst(pairs, judge, cp, flu).j;
}

}  // namespace revguard::metrics

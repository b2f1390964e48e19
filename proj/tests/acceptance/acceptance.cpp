// One PASS/FAIL line per acceptance criterion. Exit status is the number of
// failed criteria.

#include "helpers.h"
#include "parser_corpus.h"

#include "revguard/cli/commands.h"
#include "revguard/coach/coach.h"
#include "revguard/core/json_io.h"
#include "revguard/corpus/split.h"
#include "revguard/metrics/agreement.h"
#include "revguard/metrics/classification.h"
#include "revguard/metrics/tst.h"
#include "revguard/reframer/corpus_builder.h"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <random>
#include <sstream>

using namespace revguard;
using nlohmann::json;

namespace {

// Collects failure notes for one criterion.
struct Check {
  std::vector<std::string> notes;
  void expect(bool ok, const std::string& what) {
    if (!ok && notes.size() < 5) notes.push_back(what);
    if (!ok) ++failures;
  }
  int failures = 0;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

int report(const std::string& name, const Check& c, double elapsed, double budget = 0.0) {
  const bool slow = budget > 0.0 && elapsed >= budget;
  const bool ok = c.failures == 0 && !slow;
  std::printf("%s %s (%.3fs)\n", ok ? "PASS" : "FAIL", name.c_str(), elapsed);
  for (const auto& n : c.notes) std::printf("    %s\n", n.c_str());
  if (slow) std::printf("    over the %.1fs budget\n", budget);
  if (c.failures > static_cast<int>(c.notes.size())) {
    std::printf("    ... %d failures in total\n", c.failures);
  }
  return ok ? 0 : 1;
}

int metric_oracles() {
  const auto start = Clock::now();
  Check c;
  const auto prf = metrics::precision_recall_f1({96, 2, 4, 0});
  c.expect(std::abs(prf.f1 - 0.97) <= 0.005, "F1 from p=0.98 r=0.96");

  // Reference values from tests/oracles/derive.py.
  const std::pair<metrics::ConfusionCounts, double> rows[] = {
      {{2, 1, 1, 2}, 1.0 / 3.0},
      {{90, 5, 10, 895}, 0.91514209663069327252},
      {{5, 0, 0, 5}, 1.0},
      {{0, 3, 4, 0}, -1.0},
      {{7, 3, 2, 0}, -0.25819888974716112568},
      {{40, 10, 20, 30}, 0.40824829046386301637},
      {{1, 0, 99, 900}, 0.094915799575249899535},
  };
  for (const auto& [counts, expected] : rows) {
    c.expect(std::abs(metrics::mcc(counts) - expected) < 1e-12, "mcc reference " + std::to_string(expected));
  }

  std::mt19937_64 rng(20240601);
  std::bernoulli_distribution coin(0.5);
  for (int trial = 0; trial < 2000; ++trial) {
    const std::size_t n = 1 + rng() % 8, k = 1 + rng() % 3;
    std::vector<std::string> cats;
    for (std::size_t j = 0; j < k; ++j) cats.push_back("c" + std::to_string(j));
    std::vector<std::vector<bool>> g(n, std::vector<bool>(k)), p = g;
    std::vector<std::set<std::string>> gold(n), pred(n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < k; ++j) {
        g[i][j] = coin(rng);
        p[i][j] = coin(rng);
        if (g[i][j]) gold[i].insert(cats[j]);
        if (p[i][j]) pred[i].insert(cats[j]);
      }
    }
    double f1 = 0, m = 0;
    for (std::size_t j = 0; j < k; ++j) {
      double tp = 0, fp = 0, fn = 0, tn = 0;
      for (std::size_t i = 0; i < n; ++i) {
        if (g[i][j] && p[i][j]) tp += 1;
        else if (p[i][j]) fp += 1;
        else if (g[i][j]) fn += 1;
        else tn += 1;
      }
      const double prec = tp + fp == 0 ? 0 : tp / (tp + fp);
      const double rec = tp + fn == 0 ? 0 : tp / (tp + fn);
      f1 += prec + rec == 0 ? 0 : 2 * prec * rec / (prec + rec);
      const double den = std::sqrt((tp + fp) * (tp + fn) * (tn + fp) * (tn + fn));
      m += den == 0 ? 0 : (tp * tn - fp * fn) / den;
    }
    const auto ev = metrics::build_multilabel_eval(gold, pred, cats);
    c.expect(std::abs(metrics::macro_f1(ev) - f1 / k) < 1e-12, "macro F1 trial " + std::to_string(trial));
    c.expect(std::abs(metrics::macro_mcc(ev) - m / k) < 1e-12, "macro MCC trial " + std::to_string(trial));
  }
  return report("metric oracles", c, seconds_since(start), 5.0);
}

int j_score_contract() {
  const auto start = Clock::now();
  Check c;
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::bernoulli_distribution coin(0.6);
  for (int trial = 0; trial < 1500; ++trial) {
    std::vector<metrics::TstRecord> recs(1 + rng() % 50);
    double sum = 0;
    for (auto& r : recs) {
      r = {coin(rng), u(rng), u(rng)};
      sum += (r.acc ? 1.0 : 0.0) * r.sim * r.flu;
    }
    const auto ev = metrics::aggregate_tst(recs);
    c.expect(std::abs(ev.j - sum / recs.size()) < 1e-12, "J mean of products, trial " + std::to_string(trial));
    c.expect(ev.j <= ev.sta, "J <= STA, trial " + std::to_string(trial));
    for (auto& r : recs) r.sim = r.flu = 1.0;
    const auto ones = metrics::aggregate_tst(recs);
    c.expect(ones.j == ones.sta, "J == STA at sim = flu = 1, trial " + std::to_string(trial));
  }
  return report("J-score contract", c, seconds_since(start), 5.0);
}

int kappa_suite() {
  const auto start = Clock::now();
  Check c;
  const std::vector<bool> a = {1, 1, 1, 1, 1, 0, 0, 0, 0, 0};
  const std::vector<bool> b = {1, 1, 1, 1, 0, 1, 0, 0, 0, 0};
  c.expect(metrics::binary_kappa(a, a) == 1.0, "identical raters");
  c.expect(metrics::binary_kappa(a, b) == 0.6, "constructed table");
  std::mt19937_64 rng(4242);
  std::bernoulli_distribution coin(0.3);
  std::vector<bool> x(10000), y(10000);
  for (std::size_t i = 0; i < x.size(); ++i) {
    x[i] = coin(rng);
    y[i] = coin(rng);
  }
  const double k = metrics::binary_kappa(x, y);
  c.expect(std::abs(k) < 0.05, "independent raters kappa " + std::to_string(k));
  return report("kappa suite", c, seconds_since(start));
}

int split_invariants() {
  const auto start = Clock::now();
  Check c;
  const auto make = [](std::size_t toxic, std::size_t clean) {
    std::vector<corpus::IdLabel> items;
    for (std::size_t i = 0; i < toxic; ++i) items.push_back({"t" + std::to_string(i), Label::kToxic});
    for (std::size_t i = 0; i < clean; ++i) items.push_back({"n" + std::to_string(i), Label::kNonToxic});
    return items;
  };
  std::mt19937_64 rng(31337);
  for (int trial = 0; trial < 200; ++trial) {
    // Every class needs at least k members.
    const int k = 2 + static_cast<int>(rng() % 19);
    const std::size_t size = 2 * k + rng() % 3000;
    const double balance = 0.05 + 0.9 * std::uniform_real_distribution<double>(0, 1)(rng);
    const std::size_t toxic = std::clamp<std::size_t>(static_cast<std::size_t>(size * balance), k, size - k);
    const std::size_t clean = size - toxic;
    const auto items = make(toxic, clean);
    const auto s = corpus::stratified_kfold(items, k, rng());
    const std::string t = " trial " + std::to_string(trial);
    c.expect(s.tags.size() == items.size(), "totality" + t);
    std::map<std::string, std::array<std::size_t, 2>> per_fold;
    for (int f = 0; f < k; ++f) per_fold[corpus::fold_tag(f)] = {0, 0};
    for (const auto& [id, label] : items) {
      const auto it = s.tags.find(id);
      if (it == s.tags.end() || !per_fold.count(it->second)) {
        c.expect(false, "unassigned or unknown fold" + t);
        continue;
      }
      ++per_fold[it->second][label == Label::kToxic ? 0 : 1];
    }
    std::size_t assigned = 0;
    for (int cls = 0; cls < 2; ++cls) {
      std::size_t lo = SIZE_MAX, hi = 0;
      for (const auto& [tag, counts] : per_fold) {
        lo = std::min(lo, counts[cls]);
        hi = std::max(hi, counts[cls]);
        assigned += counts[cls];
      }
      c.expect(hi - lo <= 1, "per-class deviation" + t);
    }
    // Each id carries exactly one tag, so folds are disjoint when every
    // item is counted once.
    c.expect(assigned == items.size(), "disjointness" + t);
  }
  const auto reported = make(10120, 28641);
  const auto s = corpus::stratified_kfold(reported, 10, 2024);
  std::map<std::string, std::array<std::size_t, 2>> per_fold;
  for (const auto& [id, label] : reported) ++per_fold[s.tags.at(id)][label == Label::kToxic ? 0 : 1];
  c.expect(per_fold.size() == 10, "ten folds");
  for (const auto& [tag, counts] : per_fold) {
    c.expect(counts[0] == 1012, tag + " toxic " + std::to_string(counts[0]));
    c.expect(counts[1] == 2864 || counts[1] == 2865, tag + " non-toxic " + std::to_string(counts[1]));
  }
  return report("split invariants", c, seconds_since(start), 10.0);
}

int parser_robustness() {
  const auto start = Clock::now();
  Check c;
  const Taxonomy& t = testing::default_taxonomy();
  const auto& good = testing::well_formed_cases();
  const auto& bad = testing::malformed_cases();
  c.expect(good.size() >= 20 && bad.size() >= 20, "corpus sizes");
  for (const auto& pc : good) {
    const auto a = coach::parse_coach_response(pc.raw, t, coach::ParseMode::kStrict);
    c.expect(a.parse_status == ParseStatus::kStrictOk && a.categories == pc.expected, "well-formed " + pc.name);
  }
  const auto in_taxonomy = [&](const std::set<std::string>& ids) {
    for (const auto& id : ids) {
      if (!t.contains(id) || id == t.marker().id) return false;
    }
    return true;
  };
  for (const auto& pc : bad) {
    const auto strict = coach::parse_coach_response(pc.raw, t, coach::ParseMode::kStrict);
    const auto lenient = coach::parse_coach_response(pc.raw, t, coach::ParseMode::kLenient);
    c.expect(std::includes(lenient.categories.begin(), lenient.categories.end(), strict.categories.begin(),
                           strict.categories.end()),
             "lenient superset " + pc.name);
    c.expect(lenient.categories == pc.expected, "lenient recovery " + pc.name);
    c.expect(in_taxonomy(lenient.categories), "taxonomy ids " + pc.name);
  }
  std::mt19937_64 rng(99991);
  const std::string alphabet = "<>/=\"' &;#x![]-?CDATA\tcategorynameresultinsultthreat\n\xc3\xa9\xff";
  std::uniform_int_distribution<std::size_t> pick(0, alphabet.size() - 1);
  int crashes = 0;
  for (int i = 0; i < 10000; ++i) {
    std::string s;
    if (i % 2 == 0) {
      s = (i % 4 == 0 ? good : bad)[(i / 4) % 20].raw;
      const int edits = 1 + static_cast<int>(rng() % 6);
      for (int e = 0; e < edits && !s.empty(); ++e) {
        const std::size_t pos = rng() % s.size();
        switch (rng() % 3) {
          case 0: s[pos] = alphabet[pick(rng)]; break;
          case 1: s.erase(pos, 1 + rng() % 8); break;
          default: s.insert(pos, 1, alphabet[pick(rng)]);
        }
      }
    } else {
      s.resize(rng() % 200);
      for (char& ch : s) ch = alphabet[pick(rng)];
    }
    for (auto mode : {coach::ParseMode::kStrict, coach::ParseMode::kLenient}) {
      try {
        const auto a = coach::parse_coach_response(s, t, mode);
        c.expect(in_taxonomy(a.categories), "fuzz ids in taxonomy");
      } catch (...) {
        ++crashes;
      }
    }
  }
  c.expect(crashes == 0, std::to_string(crashes) + " fuzz inputs threw");
  return report("parser robustness", c, seconds_since(start));
}

std::vector<json> json_lines(const std::string& text) {
  std::vector<json> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) {
    if (!line.empty()) out.push_back(json::parse(line));
  }
  return out;
}

std::string stripped(const std::string& text) {
  std::string out;
  for (const json& j : json_lines(text)) {
    json s = strip_timing_fields(j);
    if (s.contains("verdict")) s["verdict"].erase("cached");
    out += s.dump() + "\n";
  }
  return out;
}

int end_to_end_determinism() {
  const auto start = Clock::now();
  Check c;
  testing::TempDir dir;
  std::vector<std::string> runs;
  for (int run = 0; run < 3; ++run) {
    cli::ModerateFileOptions o;
    o.input = testing::fixture("comments50.jsonl");
    o.output = dir.file("run" + std::to_string(run) + ".jsonl");
    o.config_path = testing::fixture("gateway.json");
    o.want_rewrite = true;
    o.concurrency = run + 1;
    std::ostringstream out, err;
    c.expect(cli::cmd_moderate_file(o, out, err) == cli::kExitOk, "run exit status: " + err.str());
    runs.push_back(stripped(testing::read_text(o.output)));
  }
  c.expect(json_lines(runs[0]).size() == 50, "fifty records");
  c.expect(runs[0] == runs[1] && runs[1] == runs[2], "byte-identical runs");
  for (const json& r : json_lines(runs[0])) {
    if (r.contains("error")) {
      c.expect(false, "error record " + r.dump());
      continue;
    }
    const bool toxic = r["verdict"]["label"] == "toxic";
    c.expect(toxic || (r["assignment"].is_null() && r["rewrite"].is_null()),
             "short-circuit " + r.value("comment_id", std::string{}));
  }

  // Cache: a second pass over the same gateway issues no backend calls.
  auto gw = gateway::Gateway::from_config(cli::load_config(testing::fixture("gateway.json")));
  const auto coach = std::dynamic_pointer_cast<backend::MockChatBackend>(gw->registry().chat("mock-coach"));
  const auto teacher = std::dynamic_pointer_cast<backend::MockChatBackend>(gw->registry().chat("mock-teacher"));
  c.expect(coach && teacher, "mock backends present");
  if (coach && teacher) {
    std::istringstream in1(testing::read_text(testing::fixture("comments50.jsonl")));
    std::ostringstream out1;
    cli::moderate_stream(*gw, in1, out1, true);
    const std::size_t coach_calls = coach->call_count(), teacher_calls = teacher->call_count();
    c.expect(coach_calls > 0 && teacher_calls > 0, "first pass reaches the backends");
    std::istringstream in2(testing::read_text(testing::fixture("comments50.jsonl")));
    std::ostringstream out2;
    cli::moderate_stream(*gw, in2, out2, true);
    c.expect(coach->call_count() == coach_calls, "second pass coach calls");
    c.expect(teacher->call_count() == teacher_calls, "second pass teacher calls");
    for (const json& r : json_lines(out2.str())) {
      c.expect(r["verdict"]["cached"] == true, "second pass served from cache");
    }
    c.expect(stripped(out1.str()) == stripped(out2.str()), "cached outcomes equal computed ones");
    const gateway::ModerateRequest req{"Only an idiot would call `free()` twice on the same buffer.", std::nullopt, true};
    gw->moderate(req);
    const std::size_t before = coach->call_count() + teacher->call_count();
    const auto again = gw->moderate(req);
    c.expect(again.verdict.cached && coach->call_count() + teacher->call_count() == before,
             "identical request served without a backend call");
  }
  return report("end-to-end determinism", c, seconds_since(start));
}

int corpus_builder_resume() {
  const auto start = Clock::now();
  Check c;
  auto [registry, mock] = testing::registry_with_mock("teacher");
  mock->set_default({backend::MockReply::ok(
      "<reasoning>keep the request, drop the insult</reasoning><rewrite>Please revisit this change number.</rewrite>")});
  std::vector<CommentRecord> toxic;
  for (int i = 0; i < 12; ++i) toxic.push_back({"p" + std::to_string(i), "what a stupid change number " + std::to_string(i)});
  reframer::ReframeConfig rc;
  rc.backend_id = "teacher";
  testing::TempDir dir;
  reframer::CorpusBuildOptions opts;
  opts.output_path = dir.file("pairs.jsonl");
  opts.checkpoint_path = dir.file("ckpt.jsonl");
  opts.rejects_path = dir.file("rejects.jsonl");
  int started = 0;
  opts.stop_requested = [&] { return started++ >= 5; };
  const auto first = reframer::build_parallel_corpus(toxic, "teacher", rc, *registry, opts);
  c.expect(first.interrupted, "first run interrupted");
  const std::size_t done = first.pairs.size() + first.rejects.size();
  c.expect(mock->call_count() == done, "one call per finished item before the interruption");
  const std::size_t before = mock->call_count();
  opts.stop_requested = {};
  const auto second = reframer::build_parallel_corpus(toxic, "teacher", rc, *registry, opts);
  const std::size_t unfinished = toxic.size() - done;
  c.expect(!second.interrupted, "resume completes");
  c.expect(second.skipped == done, "resume skips finished items");
  c.expect(mock->call_count() - before == unfinished,
           "resume calls " + std::to_string(mock->call_count() - before) + " for " + std::to_string(unfinished));
  c.expect(json_lines(testing::read_text(opts.output_path)).size() + json_lines(testing::read_text(opts.rejects_path)).size() ==
               toxic.size(),
           "every item written once");
  return report("corpus-builder resumability", c, seconds_since(start));
}

}  // namespace

int main() {
  std::setvbuf(stdout, nullptr, _IOLBF, 0);
  int failed = 0;
  failed += metric_oracles();
  failed += j_score_contract();
  failed += kappa_suite();
  failed += split_invariants();
  failed += parser_robustness();
  failed += end_to_end_determinism();
  failed += corpus_builder_resume();
  std::printf("%d of 7 criteria failed\n", failed);
  return failed;
}

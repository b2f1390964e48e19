#include "revguard/cli/commands.h"

#include "revguard/backend/registry.h"
#include "revguard/core/json_io.h"
#include "revguard/core/text.h"
#include "revguard/corpus/corpus.h"
#include "revguard/corpus/split.h"
#include "revguard/filter/toxicity_filter.h"
#include "revguard/metrics/classification.h"
#include "revguard/metrics/scorers.h"
#include "revguard/metrics/tst.h"
#include "revguard/reframer/corpus_builder.h"

#include <atomic>
#include <csignal>
#include <fstream>
#include <iostream>
#include <map>
#include <pthread.h>
#include <set>
#include <sstream>
#include <thread>

namespace revguard::cli {

using nlohmann::json;

namespace {

// Missing or unwritable files and similar host problems.
class EnvironmentError : public Error {
 public:
  using Error::Error;
};

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw EnvironmentError("cannot read '" + path + "'");
  return in;
}

std::ofstream open_output(const std::string& path, std::ios::openmode mode = std::ios::trunc) {
  std::ofstream out(path, std::ios::binary | mode);
  if (!out) throw EnvironmentError("cannot write '" + path + "'");
  return out;
}

template <typename F>
int guarded(std::ostream& err, F&& body) {
  try {
    return body();
  } catch (const EnvironmentError& e) {
    err << "error: " << e.what() << "\n";
    return kExitEnvironment;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitEnvironment;
  }
}

struct JsonLine {
  std::size_t line = 0;
  json value;
};

std::vector<JsonLine> read_json_lines(const std::string& path) {
  std::ifstream in = open_input(path);
  std::vector<JsonLine> out;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (text::is_blank(line)) continue;
    try {
      json j = json::parse(line);
      if (!j.is_object()) throw corpus::FormatError(n, "", "record is not an object");
      out.push_back({n, std::move(j)});
    } catch (const json::parse_error& e) {
      throw corpus::FormatError(n, "", std::string("malformed record: ") + e.what());
    }
  }
  return out;
}

std::string record_id(const JsonLine& l) {
  for (const char* key : {"id", "comment_id", "pair_id"}) {
    if (auto it = l.value.find(key); it != l.value.end() && it->is_string()) return it->get<std::string>();
  }
  throw corpus::FormatError(l.line, "id", "record has no id");
}

// Fails with the ids present on one side only.
void check_alignment(const std::set<std::string>& gold, const std::set<std::string>& predicted) {
  std::vector<std::string> missing_pred, missing_gold;
  for (const auto& id : gold) {
    if (!predicted.contains(id)) missing_pred.push_back(id);
  }
  for (const auto& id : predicted) {
    if (!gold.contains(id)) missing_gold.push_back(id);
  }
  if (missing_pred.empty() && missing_gold.empty()) return;
  auto list = [](const std::vector<std::string>& ids) {
    std::string s;
    for (std::size_t i = 0; i < ids.size() && i < 20; ++i) s += (i ? ", " : "") + ids[i];
    if (ids.size() > 20) s += ", ... (" + std::to_string(ids.size()) + " total)";
    return s;
  };
  std::string msg = "prediction and gold ids differ;";
  if (!missing_pred.empty()) msg += " missing from predictions: " + list(missing_pred) + ";";
  if (!missing_gold.empty()) msg += " missing from gold: " + list(missing_gold) + ";";
  msg.pop_back();
  throw ValidationError(msg);
}

Label predicted_label(const JsonLine& l) {
  const json* node = nullptr;
  if (l.value.contains("label")) {
    node = &l.value.at("label");
  } else if (l.value.contains("verdict") && l.value.at("verdict").contains("label")) {
    node = &l.value.at("verdict").at("label");
  }
  if (!node || !node->is_string()) throw corpus::FormatError(l.line, "label", "prediction has no label");
  try {
    return parse_label(node->get<std::string>());
  } catch (const ValidationError& e) {
    throw corpus::FormatError(l.line, "label", e.what());
  }
}

std::set<std::string> predicted_categories(const JsonLine& l) {
  const json* node = nullptr;
  if (l.value.contains("categories")) {
    node = &l.value.at("categories");
  } else if (auto it = l.value.find("assignment"); it != l.value.end()) {
    if (it->is_null()) return {};
    if (it->contains("categories")) node = &it->at("categories");
  } else if (l.value.contains("verdict")) {
    return {};  // short-circuited outcome: non-toxic
  }
  if (!node || !node->is_array()) throw corpus::FormatError(l.line, "categories", "prediction has no categories");
  std::set<std::string> out;
  for (const json& c : *node) {
    if (!c.is_string()) throw corpus::FormatError(l.line, "categories", "expected strings");
    out.insert(text::to_slug(c.get<std::string>()));
  }
  return out;
}

std::optional<std::string> predicted_target(const JsonLine& l) {
  for (const char* key : {"target", "rewritten"}) {
    if (auto it = l.value.find(key); it != l.value.end() && it->is_string()) return it->get<std::string>();
  }
  if (auto it = l.value.find("rewrite"); it != l.value.end() && it->is_object() && it->contains("rewritten")) {
    return it->at("rewritten").get<std::string>();
  }
  return std::nullopt;
}

metrics::MetricReport eval_binary(const std::vector<JsonLine>& preds, const corpus::LabeledCorpus& gold) {
  std::map<std::string, Label> gold_labels, pred_labels;
  for (const auto& r : gold.records) gold_labels[r.comment.id] = r.label;
  for (const auto& l : preds) {
    if (!pred_labels.emplace(record_id(l), predicted_label(l)).second) {
      throw corpus::FormatError(l.line, "id", "duplicate prediction id");
    }
  }
  std::set<std::string> gid, pid;
  for (const auto& [id, _] : gold_labels) gid.insert(id);
  for (const auto& [id, _] : pred_labels) pid.insert(id);
  check_alignment(gid, pid);

  std::vector<char> g, p;
  for (const auto& [id, label] : gold_labels) {
    g.push_back(label == Label::kToxic);
    p.push_back(pred_labels.at(id) == Label::kToxic);
  }
  metrics::ConfusionCounts c;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (g[i] && p[i]) ++c.tp;
    else if (!g[i] && p[i]) ++c.fp;
    else if (g[i] && !p[i]) ++c.fn;
    else ++c.tn;
  }
  const auto prf = metrics::precision_recall_f1(c);
  metrics::MetricReport report;
  report.mode = "binary";
  report.sample_count = static_cast<std::size_t>(c.total());
  report.scalars = {{"precision", prf.precision}, {"recall", prf.recall}, {"f1", prf.f1}, {"mcc", metrics::mcc(c)}};
  report.per_class.push_back(metrics::make_class_row("toxic", c));
  return report;
}

metrics::MetricReport eval_multiclass(const std::vector<JsonLine>& preds, const corpus::LabeledCorpus& gold,
                                      const Taxonomy& taxonomy) {
  const std::string marker = taxonomy.marker().id;
  std::map<std::string, std::set<std::string>> gold_sets, pred_sets;
  for (const auto& r : gold.records) {
    std::set<std::string> cats = r.categories.value_or(std::set<std::string>{});
    if (r.label == Label::kNonToxic && cats.empty()) cats.insert(marker);
    gold_sets[r.comment.id] = std::move(cats);
  }
  for (const auto& l : preds) {
    if (!pred_sets.emplace(record_id(l), predicted_categories(l)).second) {
      throw corpus::FormatError(l.line, "id", "duplicate prediction id");
    }
  }
  std::set<std::string> gid, pid;
  for (const auto& [id, _] : gold_sets) gid.insert(id);
  for (const auto& [id, _] : pred_sets) pid.insert(id);
  check_alignment(gid, pid);

  std::vector<std::set<std::string>> g, p;
  for (const auto& [id, cats] : gold_sets) {
    g.push_back(cats);
    p.push_back(pred_sets.at(id));
  }
  std::vector<std::string> categories;
  for (const CategoryDef& def : taxonomy.categories()) categories.push_back(def.id);
  const metrics::MultiLabelEval m = metrics::build_multilabel_eval(g, p, categories, marker);

  metrics::MetricReport report;
  report.mode = "multiclass";
  report.sample_count = m.sample_count;
  report.scalars = {{"macro_f1", metrics::macro_f1(m)}, {"macro_mcc", metrics::macro_mcc(m)}};
  for (const std::string& id : categories) report.per_class.push_back(metrics::make_class_row(id, m.per_category.at(id)));
  return report;
}

metrics::MetricReport eval_tst(const std::vector<JsonLine>& preds, const std::optional<corpus::LabeledCorpus>& gold,
                               const gateway::GatewayConfig& cfg) {
  std::map<std::string, std::string> sources;
  if (gold) {
    for (const auto& r : gold->records) sources[r.comment.id] = r.comment.body;
  }
  std::map<std::string, metrics::TextPair> pairs;
  for (const auto& l : preds) {
    const std::string id = record_id(l);
    auto target = predicted_target(l);
    if (!target) throw corpus::FormatError(l.line, "target", "prediction has no rewrite");
    std::string source;
    if (auto it = l.value.find("source"); it != l.value.end() && it->is_string()) {
      source = it->get<std::string>();
    } else if (auto s = sources.find(id); s != sources.end()) {
      source = s->second;
    } else if (!gold) {
      throw corpus::FormatError(l.line, "source", "no source text and no gold corpus given");
    }
    if (!pairs.emplace(id, metrics::TextPair{source, *target}).second) {
      throw corpus::FormatError(l.line, "id", "duplicate prediction id");
    }
  }
  if (gold) {
    std::set<std::string> gid, pid;
    for (const auto& [id, _] : sources) gid.insert(id);
    for (const auto& [id, _] : pairs) pid.insert(id);
    check_alignment(gid, pid);
  }
  std::vector<metrics::TextPair> list;
  for (auto& [id, pair] : pairs) list.push_back(std::move(pair));

  auto registry = backend::BackendRegistry::from_configs(cfg.backends);
  if (!cfg.lexicon_path.empty()) registry->set_lexicon(backend::Lexicon::load_file(cfg.lexicon_path));
  const metrics::BagOfWordsCosine cp;
  const metrics::RuleBasedFluency flu;
  const metrics::TstEval e =
      metrics::evaluate_tst(list, filter::make_style_judge(cfg.reframe.verification_filter, *registry), cp, flu);
  metrics::MetricReport report;
  report.mode = "tst";
  report.sample_count = e.records.size();
  report.scalars = {{"sta", e.sta}, {"cp", e.cp}, {"fluency", e.fluency}, {"j", e.j}};
  return report;
}

std::vector<CommentRecord> read_comments(const std::string& path) {
  std::ifstream in = open_input(path);
  std::vector<CommentRecord> out;
  std::string line;
  std::size_t n = 0;
  std::set<std::string> ids;
  while (std::getline(in, line)) {
    ++n;
    if (text::is_blank(line)) continue;
    CommentRecord c = corpus::parse_comment_line(line, n);
    if (!ids.insert(c.id).second) throw corpus::FormatError(n, "id", "duplicate id '" + c.id + "'");
    out.push_back(std::move(c));
  }
  return out;
}

}  // namespace

gateway::GatewayConfig load_config(const std::string& path, const std::optional<std::string>& backend) {
  gateway::GatewayConfig cfg;
  if (path.empty()) {
    cfg = gateway::parse_gateway_config("{}");
  } else {
    cfg = gateway::load_gateway_config(path);
  }
  if (backend) {
    cfg.coach.backend_id = *backend;
    cfg.reframe.backend_id = *backend;
  }
  return cfg;
}

json to_json(const ModerateSummary& s) {
  return json{{"total", s.total}, {"toxic", s.toxic}, {"rewritten", s.rewritten}, {"errors", s.errors}};
}

int cmd_serve(const ServeOptions& options, std::ostream& log) {
  return guarded(log, [&] {
    const gateway::GatewayConfig cfg = load_config(options.config_path);
    auto gw = gateway::Gateway::from_config(cfg);
    gateway::HttpServer server(*gw, cfg);
    if (!server.bind()) throw EnvironmentError("cannot listen on " + cfg.host + ":" + std::to_string(cfg.port));

    // SIGINT/SIGTERM are taken by a watcher thread that stops the server.
    sigset_t signals;
    sigemptyset(&signals);
    sigaddset(&signals, SIGINT);
    sigaddset(&signals, SIGTERM);
    sigset_t previous;
    pthread_sigmask(SIG_BLOCK, &signals, &previous);
    std::atomic<bool> done{false};
    std::thread watcher([&] {
      const timespec tick{0, 200'000'000};
      while (!done.load()) {
        if (sigtimedwait(&signals, nullptr, &tick) > 0) {
          server.stop();
          return;
        }
      }
    });

    log << "listening on http://" << cfg.host << ":" << server.port() << " (pipeline " << gw->pipeline_version()
        << ")" << std::endl;
    std::thread ready([&] {
      server.wait_until_ready();
      if (options.on_ready) options.on_ready(server);
    });
    server.listen();
    done = true;
    ready.join();
    watcher.join();
    pthread_sigmask(SIG_SETMASK, &previous, nullptr);
    gw->event_log().flush();
    log << "stopped" << std::endl;
    return kExitOk;
  });
}

ModerateSummary moderate_stream(gateway::Gateway& gw, std::istream& in, std::ostream& out, bool want_rewrite,
                                int concurrency) {
  struct Slot {
    std::size_t line = 0;
    std::optional<CommentRecord> record;
    json output;
  };
  ModerateSummary summary;
  const std::size_t batch_size = static_cast<std::size_t>(std::max(concurrency, 1)) * 16;

  auto run_one = [&](Slot& slot) {
    try {
      gateway::ModerateRequest req;
      req.text = slot.record->body;
      req.context = slot.record->context;
      req.want_rewrite = want_rewrite;
      req.comment_id = slot.record->id;
      slot.output = json(gw.moderate(req));
    } catch (...) {
      const gateway::HttpReply reply = gateway::reply_for_current_exception();
      slot.output = json{{"line", slot.line}, {"id", slot.record->id}, {"error", reply.body.at("error")}};
    }
  };

  auto flush_batch = [&](std::vector<Slot>& batch) {
    std::set<std::string> seen;
    std::vector<Slot*> leaders, repeats;
    for (Slot& s : batch) {
      if (!s.record) continue;
      (seen.insert(text::normalize(s.record->body)).second ? leaders : repeats).push_back(&s);
    }
    if (concurrency <= 1 || leaders.size() <= 1) {
      for (Slot* s : leaders) run_one(*s);
    } else {
      std::atomic<std::size_t> next{0};
      std::vector<std::jthread> pool;
      const int n = std::min<int>(concurrency, static_cast<int>(leaders.size()));
      for (int t = 0; t < n; ++t) {
        pool.emplace_back([&] {
          for (std::size_t i = next++; i < leaders.size(); i = next++) run_one(*leaders[i]);
        });
      }
    }
    for (Slot* s : repeats) run_one(*s);

    for (Slot& s : batch) {
      ++summary.total;
      if (s.output.contains("error")) {
        ++summary.errors;
      } else {
        if (s.output.at("verdict").at("label") == "toxic") ++summary.toxic;
        if (!s.output.at("rewrite").is_null()) ++summary.rewritten;
      }
      out << s.output.dump(-1, ' ', false, json::error_handler_t::replace) << '\n';
    }
    out.flush();
    batch.clear();
  };

  std::vector<Slot> batch;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (text::is_blank(line)) continue;
    Slot slot;
    slot.line = n;
    try {
      slot.record = corpus::parse_comment_line(line, n);
    } catch (const ValidationError& e) {
      slot.output = json{{"line", n},
                         {"id", nullptr},
                         {"error", gateway::error_envelope("invalid_record", e.what()).at("error")}};
    }
    batch.push_back(std::move(slot));
    if (batch.size() >= batch_size) flush_batch(batch);
  }
  if (!batch.empty()) flush_batch(batch);
  return summary;
}

int cmd_moderate_file(const ModerateFileOptions& options, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (options.concurrency < 1) throw ConfigError("--concurrency must be >= 1");
    const gateway::GatewayConfig cfg = load_config(options.config_path, options.backend);
    auto gw = gateway::Gateway::from_config(cfg);
    std::ifstream in = open_input(options.input);
    std::ofstream file = open_output(options.output);
    const ModerateSummary summary = moderate_stream(*gw, in, file, options.want_rewrite, options.concurrency);
    file.close();
    if (!file) throw EnvironmentError("failed writing '" + options.output + "'");
    out << to_json(summary).dump() << std::endl;
    return options.strict && summary.errors > 0 ? kExitPartial : kExitOk;
  });
}

EvalMode parse_eval_mode(std::string_view s) {
  if (s == "binary") return EvalMode::kBinary;
  if (s == "multiclass") return EvalMode::kMulticlass;
  if (s == "tst") return EvalMode::kTst;
  throw ConfigError("unknown eval mode '" + std::string(s) + "' (binary, multiclass, tst)");
}

metrics::MetricReport run_eval(EvalMode mode, const std::string& predictions_path, const std::string& gold_path,
                               const gateway::GatewayConfig& cfg) {
  const std::vector<JsonLine> preds = read_json_lines(predictions_path);
  if (preds.empty()) throw ValidationError("predictions file '" + predictions_path + "' is empty");
  std::optional<corpus::LabeledCorpus> gold;
  if (!gold_path.empty()) {
    open_input(gold_path);
    gold = corpus::ingest(gold_path);
  }
  if (mode != EvalMode::kTst && !gold) throw ConfigError("a gold file is required for this mode");
  switch (mode) {
    case EvalMode::kBinary: return eval_binary(preds, *gold);
    case EvalMode::kMulticlass: {
      const std::string path =
          cfg.taxonomy_path.empty() ? gateway::default_data_dir() + "/taxonomy/default.json" : cfg.taxonomy_path;
      const Taxonomy taxonomy = load_taxonomy_file(path);
      corpus::validate_categories(*gold, taxonomy);
      return eval_multiclass(preds, *gold, taxonomy);
    }
    case EvalMode::kTst: return eval_tst(preds, gold, cfg);
  }
  throw ConfigError("unknown eval mode");
}

int cmd_eval(const EvalOptions& options, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (options.format != "table" && options.format != "json") throw ConfigError("--format must be table or json");
    const gateway::GatewayConfig cfg = load_config(options.config_path);
    const metrics::MetricReport report = run_eval(options.mode, options.predictions, options.gold, cfg);
    if (options.format == "json") {
      out << metrics::to_json(report).dump() << '\n';
    } else {
      out << metrics::render_table(report);
    }
    if (!options.output.empty()) {
      std::ofstream file = open_output(options.output, std::ios::app);
      file << metrics::to_json(report).dump() << '\n';
    }
    return kExitOk;
  });
}

int cmd_split(const SplitOptions& options, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    open_input(options.input);
    const corpus::LabeledCorpus corpus = corpus::ingest(options.input);
    corpus::SplitAssignment split;
    if (options.scheme == "kfold") {
      split = corpus::stratified_kfold(corpus, options.k, options.seed);
    } else if (options.scheme == "holdout") {
      split = corpus::holdout_split(corpus, corpus::parse_ratios(options.ratios), options.seed);
    } else {
      throw ConfigError("--scheme must be kfold or holdout");
    }
    open_output(options.output);
    corpus::write_split_file(options.output, split);
    json sizes = json::object();
    for (const auto& [tag, n] : split.sizes()) sizes[tag] = n;
    out << json{{"scheme", split.scheme}, {"seed", split.seed}, {"sizes", sizes}}.dump() << std::endl;
    return kExitOk;
  });
}

int cmd_build_corpus(const BuildCorpusOptions& options, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const gateway::GatewayConfig cfg = load_config(options.config_path);
    auto registry = backend::BackendRegistry::from_configs(cfg.backends);
    if (!cfg.lexicon_path.empty()) registry->set_lexicon(backend::Lexicon::load_file(cfg.lexicon_path));
    const std::vector<CommentRecord> comments = read_comments(options.input);

    reframer::CorpusBuildOptions build;
    build.output_path = options.output;
    build.rejects_path = options.rejects.empty() ? options.output + ".rejects.jsonl" : options.rejects;
    build.checkpoint_path = options.checkpoint.empty() ? options.output + ".checkpoint.jsonl" : options.checkpoint;
    build.concurrency = options.concurrency;
    for (const std::string& path : {build.output_path, build.rejects_path, build.checkpoint_path}) {
      open_output(path, std::ios::app);
    }
    const std::string teacher = options.teacher.value_or(cfg.reframe.backend_id);
    const auto result = reframer::build_parallel_corpus(comments, teacher, cfg.reframe, *registry, build);
    out << json{{"pairs", result.pairs.size()},
                {"rejects", result.rejects.size()},
                {"skipped", result.skipped},
                {"interrupted", result.interrupted}}
               .dump()
        << std::endl;
    return options.strict && !result.rejects.empty() ? kExitPartial : kExitOk;
  });
}

}  // namespace revguard::cli

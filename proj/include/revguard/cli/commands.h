#pragma once

#include "revguard/gateway/config.h"
#include "revguard/gateway/gateway.h"
#include "revguard/gateway/http_server.h"
#include "revguard/metrics/report.h"

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>

namespace revguard::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitPartial = 1,      // per-item failures, only with --strict
  kExitConfig = 2,       // bad config, flags or input format
  kExitEnvironment = 3,  // unreadable/unwritable files, port in use
};

// Loads the config file, or defaults when `path` is empty. `backend`
// (when set) replaces the coach and reframer chat backend ids.
gateway::GatewayConfig load_config(const std::string& path, const std::optional<std::string>& backend = std::nullopt);

struct ServeOptions {
  std::string config_path;
  // Called once the port is bound; tests use it to learn the port and stop.
  std::function<void(gateway::HttpServer&)> on_ready;
};
int cmd_serve(const ServeOptions& options, std::ostream& log);

struct ModerateSummary {
  std::size_t total = 0;
  std::size_t toxic = 0;
  std::size_t rewritten = 0;
  std::size_t errors = 0;
};
nlohmann::json to_json(const ModerateSummary& s);

// Streams line records from `in` to `out`: one outcome (or error record)
// per non-blank input line, in input order. Lines are processed in batches;
// within a batch the first occurrence of each text runs concurrently and
// repeats run afterwards, so repeats are always served from the cache.
ModerateSummary moderate_stream(gateway::Gateway& gw, std::istream& in, std::ostream& out, bool want_rewrite,
                                int concurrency = 1);

struct ModerateFileOptions {
  std::string input;
  std::string output;
  std::string config_path;
  std::optional<std::string> backend;
  bool want_rewrite = false;
  bool strict = false;
  int concurrency = 1;
};
int cmd_moderate_file(const ModerateFileOptions& options, std::ostream& out, std::ostream& err);

enum class EvalMode { kBinary, kMulticlass, kTst };
EvalMode parse_eval_mode(std::string_view s);

// Predictions: one JSON object per line keyed by "id" (or "comment_id").
//   binary:     "label" or "verdict": {"label"}
//   multiclass: "categories" or "assignment": {"categories"}; empty means
//               the non-toxic marker
//   tst:        "target" (or "rewritten", or "rewrite": {"rewritten"});
//               the source comes from "source" or from the gold corpus
// Gold: a labeled corpus (line records or CSV). Ids must match exactly;
// a mismatch is a ValidationError listing the missing ids.
metrics::MetricReport run_eval(EvalMode mode, const std::string& predictions_path, const std::string& gold_path,
                               const gateway::GatewayConfig& cfg);

struct EvalOptions {
  EvalMode mode = EvalMode::kBinary;
  std::string predictions;
  std::string gold;
  std::string config_path;
  std::string output;           // JSON report file, optional
  std::string format = "table"; // table | json
};
int cmd_eval(const EvalOptions& options, std::ostream& out, std::ostream& err);

struct SplitOptions {
  std::string input;
  std::string output;
  std::string scheme = "kfold";  // kfold | holdout
  int k = 10;
  std::string ratios = "8:1:1";
  std::uint64_t seed = 0;
};
int cmd_split(const SplitOptions& options, std::ostream& out, std::ostream& err);

struct BuildCorpusOptions {
  std::string input;
  std::string output;
  std::string rejects;     // default: <output>.rejects.jsonl
  std::string checkpoint;  // default: <output>.checkpoint.jsonl
  std::string config_path;
  std::optional<std::string> teacher;  // default: the reframer backend
  int concurrency = 1;
  bool strict = false;
};
int cmd_build_corpus(const BuildCorpusOptions& options, std::ostream& out, std::ostream& err);

}  // namespace revguard::cli

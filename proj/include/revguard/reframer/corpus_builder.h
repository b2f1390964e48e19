#pragma once

#include "revguard/reframer/reframer.h"

#include <json.hpp>

#include <functional>
#include <set>

namespace revguard::reframer {

struct ParallelPair {
  std::string pair_id;  // id of the source comment
  std::string source;
  std::string target;
  std::string teacher_backend_id;
  backend::DecodingParams generation_params;

  bool operator==(const ParallelPair&) const = default;
};

// reason is one of: precondition, style, code, fluency, similarity,
// backend, empty.
struct RejectRecord {
  std::string pair_id;
  std::string reason;
  std::string message;
  std::vector<std::string> attempts;
};

nlohmann::json to_json(const ParallelPair& pair);
ParallelPair pair_from_json(const nlohmann::json& j);
nlohmann::json to_json(const RejectRecord& reject);

struct CorpusBuildOptions {
  // Line-record files, opened in append mode. Empty paths disable output.
  std::string output_path;
  std::string rejects_path;
  // One {"pair_id", "status"} line per finished item. Ids found here on
  // start are skipped.
  std::string checkpoint_path;
  int concurrency = 1;
  // Polled before each item is started; returning true stops the run after
  // in-flight items are committed.
  std::function<bool()> stop_requested;
};

struct CorpusBuildResult {
  std::vector<ParallelPair> pairs;
  std::vector<RejectRecord> rejects;
  std::size_t skipped = 0;  // already in the checkpoint
  bool interrupted = false;
};

// Reads finished pair ids from a checkpoint file. A missing file is empty;
// a malformed final line (torn write) is ignored.
std::set<std::string> read_checkpoint(const std::string& path);

// Rewrites every comment with the teacher backend and keeps the pairs that
// pass verification (style, code spans, fluency and similarity thresholds).
// Results are committed in input order. An unregistered teacher or
// verification scorer is a ConfigError; every other failure becomes a
// reject record and the run continues.
CorpusBuildResult build_parallel_corpus(std::span<const CommentRecord> toxic_set, const std::string& teacher_id,
                                        const ReframeConfig& cfg, const backend::BackendRegistry& registry,
                                        const CorpusBuildOptions& options = {});

}  // namespace revguard::reframer

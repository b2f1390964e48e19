#include "revguard/reframer/corpus_builder.h"

#include "revguard/core/errors.h"

#include <atomic>
#include <condition_variable>
#include <fstream>
#include <mutex>
#include <thread>
#include <variant>

namespace revguard::reframer {

using nlohmann::json;

namespace {

using ItemOutcome = std::variant<ParallelPair, RejectRecord>;

class AppendFile {
 public:
  explicit AppendFile(const std::string& path) {
    if (path.empty()) return;
    out_.open(path, std::ios::app | std::ios::binary);
    if (!out_) throw ConfigError("cannot open '" + path + "' for appending");
  }
  void write_line(const json& j) {
    if (!out_.is_open()) return;
    out_ << j.dump() << '\n';
    out_.flush();
  }

 private:
  std::ofstream out_;
};

RejectRecord reject(const CommentRecord& c, std::string reason, std::string message,
                    std::vector<std::string> attempts = {}) {
  return RejectRecord{c.id, std::move(reason), std::move(message), std::move(attempts)};
}

ItemOutcome process(const CommentRecord& comment, const ReframeConfig& cfg, const backend::BackendRegistry& registry,
                    const backend::DecodingParams& params) {
  ReframeTrace trace;
  try {
    trace = reframe_traced(comment, std::nullopt, cfg, registry);
  } catch (const EmptyRewriteError& e) {
    return reject(comment, "empty", e.what(), e.attempts());
  } catch (const StageError& e) {
    if (e.cause().kind() == BackendErrorKind::kNotRegistered) throw ConfigError(e.what());
    return reject(comment, "backend", e.what());
  } catch (const ValidationError& e) {
    return reject(comment, "precondition", e.what());
  }

  const RewriteResult& r = trace.result;
  auto fail = [&](std::string reason, std::string message) {
    return reject(comment, std::move(reason), std::move(message), std::move(trace.attempt_texts));
  };
  if (!r.style_pass || r.rewritten == r.original) return fail("style", "rewrite still flagged as toxic");
  if (!r.code_preserved) return fail("code", "rewrite dropped a code span");
  if (r.fluency_score < cfg.fluency_threshold) return fail("fluency", "fluency below threshold");
  if (r.content_similarity < cfg.similarity_threshold) return fail("similarity", "similarity below threshold");
  return ParallelPair{comment.id, r.original, r.rewritten, cfg.backend_id, params};
}

}  // namespace

json to_json(const ParallelPair& pair) {
  return json{{"pair_id", pair.pair_id},
              {"source", pair.source},
              {"target", pair.target},
              {"teacher_backend_id", pair.teacher_backend_id},
              {"params",
               {{"temperature", pair.generation_params.temperature},
                {"max_tokens", pair.generation_params.max_tokens},
                {"stop", pair.generation_params.stop_sequences}}}};
}

ParallelPair pair_from_json(const json& j) {
  ParallelPair p;
  p.pair_id = j.at("pair_id").get<std::string>();
  p.source = j.at("source").get<std::string>();
  p.target = j.at("target").get<std::string>();
  p.teacher_backend_id = j.at("teacher_backend_id").get<std::string>();
  if (j.contains("params")) {
    const json& params = j.at("params");
    p.generation_params.temperature = params.value("temperature", 0.0);
    p.generation_params.max_tokens = params.value("max_tokens", 1024);
    p.generation_params.stop_sequences = params.value("stop", std::vector<std::string>{});
  }
  return p;
}

json to_json(const RejectRecord& r) {
  return json{{"pair_id", r.pair_id}, {"reason", r.reason}, {"message", r.message}, {"attempts", r.attempts}};
}

std::set<std::string> read_checkpoint(const std::string& path) {
  std::set<std::string> done;
  if (path.empty()) return done;
  std::ifstream in(path, std::ios::binary);
  if (!in) return done;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    try {
      done.insert(json::parse(line).at("pair_id").get<std::string>());
    } catch (const json::exception&) {
      // torn write from an interrupted run
    }
  }
  return done;
}

CorpusBuildResult build_parallel_corpus(std::span<const CommentRecord> toxic_set, const std::string& teacher_id,
                                        const ReframeConfig& base_cfg, const backend::BackendRegistry& registry,
                                        const CorpusBuildOptions& options) {
  ReframeConfig cfg = base_cfg;
  cfg.backend_id = teacher_id;
  validate(cfg);
  if (!registry.has_chat(teacher_id)) throw ConfigError("teacher backend '" + teacher_id + "' is not registered");
  try {
    registry.scorer(cfg.verification_filter.backend_id);
  } catch (const BackendError& e) {
    throw ConfigError("verification backend: " + std::string(e.what()));
  }
  if (options.concurrency < 1) throw ConfigError("corpus build concurrency must be >= 1");

  std::set<std::string> ids;
  for (const CommentRecord& c : toxic_set) {
    if (!ids.insert(c.id).second) throw ValidationError("duplicate pair id '" + c.id + "'");
  }

  backend::DecodingParams params;
  params.max_tokens = cfg.max_tokens;

  CorpusBuildResult result;
  const std::set<std::string> done = read_checkpoint(options.checkpoint_path);
  std::vector<std::size_t> todo;
  for (std::size_t i = 0; i < toxic_set.size(); ++i) {
    if (done.contains(toxic_set[i].id)) {
      ++result.skipped;
    } else {
      todo.push_back(i);
    }
  }

  AppendFile out(options.output_path);
  AppendFile rejects(options.rejects_path);
  AppendFile checkpoint(options.checkpoint_path);

  // Workers claim items in order; finished items wait in `slots` until every
  // earlier item is committed.
  std::mutex mutex;
  std::vector<std::optional<ItemOutcome>> slots(todo.size());
  std::size_t next_commit = 0;
  std::atomic<std::size_t> next_claim{0};
  std::atomic<bool> stopped{false};
  std::exception_ptr fatal;

  auto commit_ready = [&] {
    while (next_commit < slots.size() && slots[next_commit]) {
      ItemOutcome& item = *slots[next_commit];
      if (auto* pair = std::get_if<ParallelPair>(&item)) {
        out.write_line(to_json(*pair));
        checkpoint.write_line(json{{"pair_id", pair->pair_id}, {"status", "pair"}});
        result.pairs.push_back(std::move(*pair));
      } else {
        auto& rej = std::get<RejectRecord>(item);
        rejects.write_line(to_json(rej));
        checkpoint.write_line(json{{"pair_id", rej.pair_id}, {"status", "reject"}});
        result.rejects.push_back(std::move(rej));
      }
      slots[next_commit].reset();
      ++next_commit;
    }
  };

  auto worker = [&] {
    for (;;) {
      if (stopped.load()) return;
      {
        std::lock_guard lock(mutex);
        if (fatal) return;
        if (options.stop_requested && options.stop_requested()) {
          stopped = true;
          return;
        }
      }
      const std::size_t slot = next_claim.fetch_add(1);
      if (slot >= todo.size()) return;
      try {
        ItemOutcome outcome = process(toxic_set[todo[slot]], cfg, registry, params);
        std::lock_guard lock(mutex);
        slots[slot] = std::move(outcome);
        commit_ready();
      } catch (...) {
        std::lock_guard lock(mutex);
        if (!fatal) fatal = std::current_exception();
        stopped = true;
        return;
      }
    }
  };

  const int threads = std::min<int>(options.concurrency, static_cast<int>(std::max<std::size_t>(todo.size(), 1)));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
  }
  if (fatal) std::rethrow_exception(fatal);
  result.interrupted = next_commit < todo.size();
  return result;
}

}  // namespace revguard::reframer

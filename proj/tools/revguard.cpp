#include "revguard/cli/commands.h"

#include <CLI11.hpp>

#include <iostream>

using namespace revguard;

int main(int argc, char** argv) {
  CLI::App app{"revguard: moderation pipeline for code-review comments"};
  app.require_subcommand(1);

  cli::ServeOptions serve;
  auto* serve_cmd = app.add_subcommand("serve", "run the HTTP gateway");
  serve_cmd->add_option("--config", serve.config_path, "gateway config file")->required();

  cli::ModerateFileOptions moderate;
  std::string moderate_backend;
  auto* moderate_cmd = app.add_subcommand("moderate-file", "run the pipeline over a line-record file");
  moderate_cmd->add_option("input", moderate.input, "input comments (line records)")->required();
  moderate_cmd->add_option("output", moderate.output, "outcome records")->required();
  moderate_cmd->add_option("--config", moderate.config_path, "gateway config file");
  moderate_cmd->add_option("--backend", moderate_backend, "chat backend id for coach and reframer");
  moderate_cmd->add_flag("--want-rewrite", moderate.want_rewrite, "also rewrite toxic comments");
  moderate_cmd->add_flag("--strict", moderate.strict, "exit 1 when any line fails");
  moderate_cmd->add_option("--concurrency", moderate.concurrency, "parallel requests")->capture_default_str();

  cli::EvalOptions eval;
  std::string eval_mode = "binary";
  auto* eval_cmd = app.add_subcommand("eval", "compute metrics for predictions against gold labels");
  eval_cmd->add_option("mode", eval_mode, "binary | multiclass | tst")->required();
  eval_cmd->add_option("predictions", eval.predictions, "prediction records")->required();
  eval_cmd->add_option("gold", eval.gold, "gold corpus (optional for tst when predictions carry sources)");
  eval_cmd->add_option("--config", eval.config_path, "gateway config file");
  eval_cmd->add_option("--out", eval.output, "append the JSON report to this file");
  eval_cmd->add_option("--format", eval.format, "table | json")->capture_default_str();

  cli::SplitOptions split;
  auto* split_cmd = app.add_subcommand("split", "stratified k-fold or holdout split");
  split_cmd->add_option("input", split.input, "labeled corpus")->required();
  split_cmd->add_option("output", split.output, "split file (id<TAB>tag)")->required();
  split_cmd->add_option("--scheme", split.scheme, "kfold | holdout")->capture_default_str();
  split_cmd->add_option("-k,--folds", split.k, "number of folds")->capture_default_str();
  split_cmd->add_option("--ratios", split.ratios, "holdout ratios")->capture_default_str();
  split_cmd->add_option("--seed", split.seed, "shuffle seed")->capture_default_str();

  cli::BuildCorpusOptions build;
  std::string teacher;
  auto* build_cmd = app.add_subcommand("build-corpus", "generate a parallel detoxification corpus");
  build_cmd->add_option("input", build.input, "toxic comments (line records)")->required();
  build_cmd->add_option("output", build.output, "parallel corpus file (appended)")->required();
  build_cmd->add_option("--config", build.config_path, "gateway config file");
  build_cmd->add_option("--teacher,--backend", teacher, "teacher chat backend id");
  build_cmd->add_option("--rejects", build.rejects, "rejects log");
  build_cmd->add_option("--checkpoint", build.checkpoint, "checkpoint file");
  build_cmd->add_option("--concurrency", build.concurrency, "parallel requests")->capture_default_str();
  build_cmd->add_flag("--strict", build.strict, "exit 1 when any item is rejected");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? cli::kExitOk : cli::kExitConfig;
  }

  if (*serve_cmd) return cli::cmd_serve(serve, std::cerr);
  if (*moderate_cmd) {
    if (!moderate_backend.empty()) moderate.backend = moderate_backend;
    return cli::cmd_moderate_file(moderate, std::cout, std::cerr);
  }
  if (*eval_cmd) {
    try {
      eval.mode = cli::parse_eval_mode(eval_mode);
    } catch (const std::exception& e) {
      std::cerr << e.what() << "\n";
      return cli::kExitConfig;
    }
    return cli::cmd_eval(eval, std::cout, std::cerr);
  }
  if (*split_cmd) return cli::cmd_split(split, std::cout, std::cerr);
  if (*build_cmd) {
    if (!teacher.empty()) build.teacher = teacher;
    return cli::cmd_build_corpus(build, std::cout, std::cerr);
  }
  return cli::kExitConfig;
}

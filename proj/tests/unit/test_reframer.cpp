#include "helpers.h"

#include "revguard/core/errors.h"
#include "revguard/core/json_io.h"
#include "revguard/reframer/corpus_builder.h"
#include "revguard/reframer/reframer.h"

#include <doctest.h>

using namespace revguard;
using namespace revguard::reframer;
using backend::MockReply;

namespace {

std::string reply(const std::string& rewrite) {
  return "<reasoning>1. Keep the technical point. 2. Drop the insult.</reasoning>\n<rewrite>" + rewrite + "</rewrite>";
}

ReframeConfig cfg_for(const std::string& backend) {
  ReframeConfig c;
  c.backend_id = backend;
  return c;
}

std::vector<std::string> lines_of(const std::string& path) {
  std::vector<std::string> out;
  std::istringstream in(testing::read_text(path));
  for (std::string line; std::getline(in, line);) {
    if (!line.empty()) out.push_back(line);
  }
  return out;
}

}  // namespace

TEST_SUITE("reframer") {
  TEST_CASE("clean rewrite on the first attempt") {
    auto [registry, mock] = testing::registry_with_mock("teacher");
    mock->set_default({MockReply::ok(reply("Could you rename this variable? The current name is unclear."))});
    const RewriteResult r =
        reframe({"c1", "This variable name is stupid, rename it."}, std::nullopt, cfg_for("teacher"), *registry);
    CHECK(r.attempts == 1);
    CHECK(r.style_pass);
    CHECK(r.rewritten == "Could you rename this variable? The current name is unclear.");
    CHECK(r.rationale.find("Keep the technical point") != std::string::npos);
    CHECK(r.original == "This variable name is stupid, rename it.");
  }

  TEST_CASE("still-toxic first rewrite escalates once") {
    auto [registry, mock] = testing::registry_with_mock("teacher");
    mock->set_default({MockReply::ok(reply("This variable name is still stupid.")),
                       MockReply::ok(reply("Could you rename this variable to something clearer?"))});
    const ReframeTrace t =
        reframe_traced({"c1", "This variable name is stupid, rename it."}, std::nullopt, cfg_for("teacher"), *registry);
    CHECK(t.result.attempts == 2);
    CHECK(t.result.style_pass);
    CHECK(t.attempt_texts.size() == 2);
    CHECK(mock->call_count() == 2);
  }

  TEST_CASE("all attempts toxic returns best attempt with style_pass false") {
    auto [registry, mock] = testing::registry_with_mock("teacher");
    mock->set_default({MockReply::ok(reply("still stupid code"))});
    const RewriteResult r = reframe({"c1", "stupid code"}, std::nullopt, cfg_for("teacher"), *registry);
    CHECK(r.attempts == 3);
    CHECK_FALSE(r.style_pass);
    CHECK(mock->call_count() == 3);
  }

  TEST_CASE("non-toxic input is a precondition error") {
    auto [registry, mock] = testing::registry_with_mock("teacher");
    mock->set_default({MockReply::ok(reply("x"))});
    CHECK_THROWS_AS(reframe({"c1", "Thanks, looks good."}, std::nullopt, cfg_for("teacher"), *registry),
                    ValidationError);
    CHECK(mock->call_count() == 0);
  }

  TEST_CASE("empty rewrites raise EmptyRewriteError") {
    auto [registry, mock] = testing::registry_with_mock("teacher");
    mock->set_default({MockReply::ok("<rewrite>   </rewrite>")});
    try {
      reframe({"c1", "stupid code"}, std::nullopt, cfg_for("teacher"), *registry);
      FAIL("expected failure");
    } catch (const EmptyRewriteError& e) {
      CHECK(e.stage() == "reframer");
      CHECK(e.attempts().size() == 3);
    }
  }

  TEST_CASE("backend failure is tagged reframer") {
    auto [registry, mock] = testing::registry_with_mock("teacher");
    mock->set_default({MockReply::fail(BackendErrorKind::kHttpStatus, 500)});
    try {
      reframe({"c1", "stupid code"}, std::nullopt, cfg_for("teacher"), *registry);
      FAIL("expected failure");
    } catch (const StageError& e) {
      CHECK(e.stage() == "reframer");
      CHECK_FALSE(e.cause().is_timeout());
    }
  }

  TEST_CASE("dropped code span triggers a retry") {
    auto [registry, mock] = testing::registry_with_mock("teacher");
    mock->set_default({MockReply::ok(reply("Please fix the call.")),
                       MockReply::ok(reply("Please fix the `frob()` call."))});
    const RewriteResult r =
        reframe({"c1", "This stupid `frob()` call is broken."}, std::nullopt, cfg_for("teacher"), *registry);
    CHECK(r.attempts == 2);
    CHECK(r.code_preserved);
    CHECK(r.rewritten == "Please fix the `frob()` call.");
  }

  TEST_CASE("prompt: categories, code spans, determinism, escalation") {
    const Taxonomy& t = testing::default_taxonomy();
    CategoryAssignment a;
    a.categories = {"insult"};
    a.parse_status = ParseStatus::kStrictOk;
    const CommentRecord c{"c1", "You idiot, this breaks:\n```\nrm -rf /\n```"};
    const auto p1 = build_reframe_prompt(c, a, &t);
    const auto p2 = build_reframe_prompt(c, a, &t);
    CHECK(p1 == p2);
    std::string all;
    for (const auto& m : p1) all += m.content;
    CHECK(all.find("insult") != std::string::npos);
    CHECK(all.find(t.find("insult")->display_name) != std::string::npos);
    CHECK(all.find("```\nrm -rf /\n```") != std::string::npos);
    CHECK(all.find("verbatim") != std::string::npos);
    const auto escalated = build_reframe_prompt(c, a, &t, std::string("You idiot again"));
    CHECK(escalated != p1);
    std::string esc;
    for (const auto& m : escalated) esc += m.content;
    CHECK(esc.find("You idiot again") != std::string::npos);
  }

  TEST_CASE("reply parsing fallbacks") {
    CHECK(parse_rewrite_reply("<reasoning>r</reasoning><rewrite> a </rewrite>").rewrite == "a");
    CHECK(parse_rewrite_reply("<rewrite>old</rewrite> then <rewrite>new</rewrite>").rewrite == "new");
    CHECK(parse_rewrite_reply("<reasoning>r</reasoning>\nPlain text").rewrite == "Plain text");
    CHECK(parse_rewrite_reply("Just the text").rewrite == "Just the text");
  }

  TEST_CASE("verify_rewrite: identity, empty, disjoint") {
    backend::BackendRegistry registry;
    const ReframeConfig cfg = cfg_for("unused");
    const Verification same =
        verify_rewrite("Please add a test for this.", "Please add a test for this.", cfg, registry);
    CHECK(same.style_pass);
    CHECK(same.similarity == doctest::Approx(1.0));
    CHECK_THROWS_AS(verify_rewrite("Please add a test.", "", cfg, registry), ValidationError);
    const Verification disjoint = verify_rewrite("rename variable", "delete function", cfg, registry);
    CHECK(disjoint.similarity == 0.0);
    CHECK(code_spans_preserved("use `x` and `y`", "`y` then `x`"));
    CHECK_FALSE(code_spans_preserved("use `x` and `y`", "use `x`"));
  }

  TEST_CASE("config validation") {
    ReframeConfig c = cfg_for("t");
    CHECK_NOTHROW(validate(c));
    c.max_attempts = 0;
    CHECK_THROWS_AS(validate(c), ConfigError);
    c = cfg_for("t");
    c.similarity_threshold = 2.0;
    CHECK_THROWS_AS(validate(c), ConfigError);
  }
}

TEST_SUITE("reframer") {
  TEST_CASE("corpus builder: three clean pairs") {
    auto [registry, mock] = testing::registry_with_mock("teacher");
    mock->add_rule("stupid tests", {MockReply::ok(reply("These tests need more coverage."))});
    mock->add_rule("idiot naming", {MockReply::ok(reply("This naming is hard to follow."))});
    mock->add_rule("crap docs", {MockReply::ok(reply("These docs need more detail."))});
    const std::vector<CommentRecord> toxic = {
        {"a", "These are stupid tests with no coverage."},
        {"b", "What idiot naming is this? It is hard to follow."},
        {"c", "Such crap docs, they need more detail."}};
    testing::TempDir dir;
    CorpusBuildOptions opts;
    opts.output_path = dir.file("pairs.jsonl");
    opts.rejects_path = dir.file("rejects.jsonl");
    opts.checkpoint_path = dir.file("ckpt.jsonl");
    const CorpusBuildResult r = build_parallel_corpus(toxic, "teacher", cfg_for("teacher"), *registry, opts);
    CHECK(r.pairs.size() == 3);
    CHECK(r.rejects.empty());
    CHECK_FALSE(r.interrupted);
    const auto out = lines_of(opts.output_path);
    REQUIRE(out.size() == 3);
    const ParallelPair first = pair_from_json(nlohmann::json::parse(out[0]));
    CHECK(first.pair_id == "a");
    CHECK(first.teacher_backend_id == "teacher");
    CHECK(first.target == "These tests need more coverage.");
    CHECK(first.generation_params.temperature == 0.0);
    CHECK(read_checkpoint(opts.checkpoint_path) == std::set<std::string>{"a", "b", "c"});
  }

  TEST_CASE("corpus builder: a persistently toxic rewrite is rejected for style") {
    auto [registry, mock] = testing::registry_with_mock("teacher");
    mock->add_rule("stupid tests", {MockReply::ok(reply("These tests need more coverage."))});
    mock->add_rule("idiot naming", {MockReply::ok(reply("Only an idiot would name it this way."))});
    mock->add_rule("crap docs", {MockReply::ok(reply("These docs need more detail."))});
    const std::vector<CommentRecord> toxic = {
        {"a", "These are stupid tests with no coverage."},
        {"b", "What idiot naming is this? It is hard to follow."},
        {"c", "Such crap docs, they need more detail."}};
    const CorpusBuildResult r = build_parallel_corpus(toxic, "teacher", cfg_for("teacher"), *registry);
    CHECK(r.pairs.size() == 2);
    REQUIRE(r.rejects.size() == 1);
    CHECK(r.rejects[0].pair_id == "b");
    CHECK(r.rejects[0].reason == "style");
    CHECK(r.rejects[0].attempts.size() == 3);
  }

  TEST_CASE("corpus builder: resume after interruption costs one call per unfinished item") {
    auto [registry, mock] = testing::registry_with_mock("teacher");
    mock->set_default({MockReply::ok(reply("Could you take another look at this change?"))});
    const std::vector<CommentRecord> toxic = {
        {"a", "stupid change"}, {"b", "stupid change again"}, {"c", "another stupid change"}};
    testing::TempDir dir;
    CorpusBuildOptions opts;
    opts.output_path = dir.file("pairs.jsonl");
    opts.checkpoint_path = dir.file("ckpt.jsonl");
    int started = 0;
    opts.stop_requested = [&] { return started++ >= 2; };
    const CorpusBuildResult first = build_parallel_corpus(toxic, "teacher", cfg_for("teacher"), *registry, opts);
    CHECK(first.interrupted);
    CHECK(first.pairs.size() == 2);
    CHECK(mock->call_count() == 2);

    opts.stop_requested = {};
    const CorpusBuildResult second = build_parallel_corpus(toxic, "teacher", cfg_for("teacher"), *registry, opts);
    CHECK_FALSE(second.interrupted);
    CHECK(second.skipped == 2);
    CHECK(second.pairs.size() == 1);
    CHECK(mock->call_count() == 3);
    CHECK(lines_of(opts.output_path).size() == 3);

    const CorpusBuildResult third = build_parallel_corpus(toxic, "teacher", cfg_for("teacher"), *registry, opts);
    CHECK(third.skipped == 3);
    CHECK(mock->call_count() == 3);
  }

  TEST_CASE("corpus builder: torn checkpoint line is ignored") {
    testing::TempDir dir;
    testing::write_text(dir.file("ckpt.jsonl"), "{\"pair_id\":\"a\",\"status\":\"pair\"}\n{\"pair_id\":\"b\",\"sta");
    CHECK(read_checkpoint(dir.file("ckpt.jsonl")) == std::set<std::string>{"a"});
    CHECK(read_checkpoint(dir.file("missing.jsonl")).empty());
  }

  TEST_CASE("corpus builder: concurrency keeps input order") {
    auto [registry, mock] = testing::registry_with_mock("teacher");
    mock->set_default({MockReply::ok(reply("Could you take another look at this change?"))});
    mock->set_delay(std::chrono::milliseconds(5));
    std::vector<CommentRecord> toxic;
    for (int i = 0; i < 12; ++i) toxic.push_back({"id" + std::to_string(i), "stupid change " + std::to_string(i)});
    testing::TempDir dir;
    CorpusBuildOptions opts;
    opts.output_path = dir.file("pairs.jsonl");
    opts.concurrency = 4;
    const CorpusBuildResult r = build_parallel_corpus(toxic, "teacher", cfg_for("teacher"), *registry, opts);
    REQUIRE(r.pairs.size() == 12);
    const auto out = lines_of(opts.output_path);
    for (int i = 0; i < 12; ++i) {
      CHECK(r.pairs[i].pair_id == "id" + std::to_string(i));
      CHECK(nlohmann::json::parse(out[i])["pair_id"] == "id" + std::to_string(i));
    }
    CHECK(mock->peak_concurrency() > 1);
  }

  TEST_CASE("corpus builder: guards") {
    auto [registry, mock] = testing::registry_with_mock("teacher");
    mock->set_default({MockReply::ok(reply("fine"))});
    const std::vector<CommentRecord> dup = {{"a", "stupid"}, {"a", "stupid too"}};
    CHECK_THROWS_AS(build_parallel_corpus(dup, "teacher", cfg_for("teacher"), *registry), ValidationError);
    const std::vector<CommentRecord> one = {{"a", "stupid"}};
    CHECK_THROWS_AS(build_parallel_corpus(one, "nobody", cfg_for("nobody"), *registry), ConfigError);
    CorpusBuildOptions bad;
    bad.concurrency = 0;
    CHECK_THROWS_AS(build_parallel_corpus(one, "teacher", cfg_for("teacher"), *registry, bad), ConfigError);
    const std::vector<CommentRecord> clean = {{"a", "Thanks, this looks good."}};
    const CorpusBuildResult r = build_parallel_corpus(clean, "teacher", cfg_for("teacher"), *registry);
    REQUIRE(r.rejects.size() == 1);
    CHECK(r.rejects[0].reason == "precondition");
  }
}

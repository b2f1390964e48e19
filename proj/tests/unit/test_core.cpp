#include "helpers.h"

#include "revguard/core/errors.h"
#include "revguard/core/json_io.h"
#include "revguard/core/taxonomy.h"
#include "revguard/core/text.h"
#include "revguard/core/types.h"

#include <doctest.h>

using namespace revguard;
using nlohmann::json;

namespace {

std::string category(const std::string& id, bool marker = false) {
  return json{{"id", id},
              {"display_name", id},
              {"definition", "definition of " + id},
              {"exemplars", {"example for " + id}},
              {"is_non_toxic_marker", marker}}
      .dump();
}

std::string taxonomy_doc(const std::vector<std::string>& cats) {
  std::string items;
  for (const auto& c : cats) items += (items.empty() ? "" : ",") + c;
  return R"({"version": "t1", "categories": [)" + items + "]}";
}

}  // namespace

TEST_SUITE("core") {
  TEST_CASE("normalize folds line endings and composes to NFC") {
    CHECK(text::normalize("a\r\nb\rc\n") == "a\nb\nc\n");
    CHECK(text::normalize("caf\x65\xcc\x81") == "caf\xc3\xa9");
    const std::string once = text::normalize("Ame\xcc\x81lie\r\n");
    CHECK(text::normalize(once) == once);
    CHECK(text::normalize("plain ascii") == "plain ascii");
  }

  TEST_CASE("trim, blank and slug helpers") {
    CHECK(text::trim("  x y \n") == "x y");
    CHECK(text::is_blank(" \t\n"));
    CHECK_FALSE(text::is_blank(" a "));
    CHECK(text::to_slug("Object-Directed Toxicity") == "object_directed_toxicity");
    CHECK(text::to_slug("  Non Toxic ") == "non_toxic");
  }

  TEST_CASE("sha256 matches the published test vector") {
    CHECK(text::sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    CHECK(text::sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  }

  TEST_CASE("code spans: fenced, inline, unterminated") {
    const std::string body = "use `foo()` here\n```\nint x;\n```\nand `bar`";
    const auto spans = text::find_code_spans(body);
    REQUIRE(spans.size() == 3);
    CHECK(spans[0].text == "`foo()`");
    CHECK_FALSE(spans[0].fenced);
    CHECK(spans[1].text == "```\nint x;\n```");
    CHECK(spans[1].fenced);
    CHECK(spans[2].text == "`bar`");
    CHECK(text::replace_code_spans(body, "[code]") == "use [code] here\n[code]\nand [code]");

    CHECK(text::find_code_spans("a `` b").empty());
    CHECK(text::find_code_spans("tick ` across\nlines `").empty());
    const auto after_open_fence = text::find_code_spans("``` never closed, but `x` is code");
    REQUIRE(after_open_fence.size() == 1);
    CHECK(after_open_fence[0].text == "`x`");
  }

  TEST_CASE("comment validation and labels") {
    CHECK_NOTHROW(validate(CommentRecord{"1", "ok"}));
    CHECK_THROWS_AS(validate(CommentRecord{"1", "  \n "}), ValidationError);
    CHECK_THROWS_AS(validate(CommentRecord{"", "body"}), ValidationError);
    CHECK(parse_label("toxic") == Label::kToxic);
    CHECK(parse_label("non_toxic") == Label::kNonToxic);
    CHECK(parse_label("Non-Toxic") == Label::kNonToxic);
    CHECK(parse_label("1") == Label::kToxic);
    CHECK_THROWS_AS(parse_label("maybe"), ValidationError);
  }

  TEST_CASE("taxonomy: attested four plus marker") {
    const Taxonomy t = load_taxonomy(taxonomy_doc({category("profanity"), category("insult"), category("trolling"),
                                                   category("object_directed"), category("non_toxic", true)}));
    CHECK(t.toxic_count() == 4);
    CHECK(t.categories().size() == 5);
    CHECK(t.marker().id == "non_toxic");
    CHECK(t.contains("insult"));
  }

  TEST_CASE("taxonomy: minimal and invalid configs") {
    CHECK(load_taxonomy(taxonomy_doc({category("insult"), category("non_toxic", true)})).categories().size() == 2);
    CHECK_THROWS_AS(load_taxonomy(taxonomy_doc({category("insult"), category("insult"), category("non_toxic", true)})),
                    ConfigError);
    CHECK_THROWS_AS(load_taxonomy(taxonomy_doc({category("insult")})), ConfigError);
    CHECK_THROWS_AS(load_taxonomy(taxonomy_doc({category("non_toxic", true)})), ConfigError);
    CHECK_THROWS_AS(load_taxonomy(taxonomy_doc({category("a", true), category("b", true), category("c")})), ConfigError);
    CHECK_THROWS_AS(load_taxonomy(R"({"version": "x", "categories": [{"id": "insult", "display_name": "I",
                                      "definition": "d", "exemplars": [], "is_non_toxic_marker": false}]})"),
                    ConfigError);
    CHECK_THROWS_AS(load_taxonomy("{not json"), ConfigError);
  }

  TEST_CASE("taxonomy ids are slugged and display names kept") {
    const Taxonomy t = load_taxonomy(taxonomy_doc(
        {R"({"id": "Object-Directed", "display_name": "Object-Directed Toxicity", "definition": "d",
             "exemplars": ["e"], "is_non_toxic_marker": false})",
         category("non_toxic", true)}));
    REQUIRE(t.find("object_directed"));
    CHECK(t.find("object_directed")->display_name == "Object-Directed Toxicity");
  }

  TEST_CASE("taxonomy round-trips through serialization") {
    const Taxonomy& t = testing::default_taxonomy();
    CHECK(load_taxonomy(serialize_taxonomy(t)) == t);
  }

  TEST_CASE("default taxonomy: 11 toxic categories, marker, provenance") {
    const Taxonomy& t = testing::default_taxonomy();
    CHECK(t.toxic_count() == 11);
    CHECK(t.marker().id == "non_toxic");
    int attested = 0;
    for (const CategoryDef& def : t.categories()) {
      CHECK_FALSE(def.exemplars.empty());
      if (def.provenance == "attested") ++attested;
      if (def.is_non_toxic_marker) continue;
      const bool named_in_source = def.id == "profanity" || def.id == "insult" || def.id == "trolling" ||
                                   def.id == "object_directed";
      CHECK(def.provenance == (named_in_source ? "attested" : "external-taxonomy"));
    }
    CHECK(attested >= 4);
  }

  TEST_CASE("pipeline outcome JSON round trip and timing strip") {
    PipelineOutcome o;
    o.comment_id = "c1";
    o.verdict = Verdict{Label::kToxic, 0.75, 0.5, "lexicon", 12, false};
    CategoryAssignment a;
    a.categories = {"insult"};
    a.explanations = {{"insult", "attacks the author"}};
    a.raw_response = "<result/>";
    a.parse_status = ParseStatus::kStrictOk;
    a.raw_trace = {"<result/>"};
    o.assignment = a;
    RewriteResult r;
    r.original = "x";
    r.rewritten = "y";
    r.style_pass = true;
    r.attempts = 1;
    o.rewrite = r;
    o.stage_timings = {{"filter", 3}, {"coach", 9}};

    const json j = o;
    const PipelineOutcome back = j.get<PipelineOutcome>();
    CHECK(back.comment_id == "c1");
    CHECK(back.verdict == o.verdict);
    CHECK(back.assignment == o.assignment);
    CHECK(back.rewrite == o.rewrite);
    CHECK(back.stage_timings == o.stage_timings);

    const json stripped = strip_timing_fields(j);
    CHECK_FALSE(stripped.contains("stage_timings"));
    CHECK_FALSE(stripped["verdict"].contains("latency_ms"));
    CHECK(stripped["verdict"]["confidence"] == 0.75);

    PipelineOutcome clean;
    clean.comment_id = "c2";
    CHECK(clean.short_circuit_holds());
    const json cj = clean;
    CHECK(cj["assignment"].is_null());
    CHECK(cj["rewrite"].is_null());
    clean.assignment = CategoryAssignment{};
    CHECK_FALSE(clean.short_circuit_holds());
  }
}

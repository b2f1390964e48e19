#include "helpers.h"

#include "revguard/corpus/corpus.h"
#include "revguard/corpus/split.h"

#include <doctest.h>

#include <random>

using namespace revguard;
using namespace revguard::corpus;

namespace {

std::vector<IdLabel> synthetic(std::size_t toxic, std::size_t clean) {
  std::vector<IdLabel> items;
  for (std::size_t i = 0; i < toxic; ++i) items.push_back({"t" + std::to_string(i), Label::kToxic});
  for (std::size_t i = 0; i < clean; ++i) items.push_back({"n" + std::to_string(i), Label::kNonToxic});
  return items;
}

// tag -> label -> count
std::map<std::string, std::map<Label, std::size_t>> tally(const SplitAssignment& s, std::span<const IdLabel> items) {
  std::map<std::string, std::map<Label, std::size_t>> out;
  for (const auto& [id, label] : items) ++out[s.tags.at(id)][label];
  return out;
}

}  // namespace

TEST_SUITE("corpus") {
  TEST_CASE("ingest three well-formed line records") {
    const auto c = ingest_text(
        "{\"id\": \"a\", \"body\": \"fine\", \"label\": \"non_toxic\"}\n"
        "\n"
        "{\"id\": \"b\", \"body\": \"you idiot\", \"label\": \"toxic\", \"categories\": [\"insult\"]}\n"
        "{\"id\": \"c\", \"body\": \"ok\", \"label\": \"non_toxic\", \"source\": \"gh\"}\n",
        CorpusFormat::kLineRecords);
    REQUIRE(c.records.size() == 3);
    CHECK(c.count(Label::kToxic) == 1);
    CHECK(c.records[1].categories == std::set<std::string>{"insult"});
    CHECK(c.records[2].comment.source == "gh");
    CHECK_NOTHROW(validate_categories(c, testing::default_taxonomy()));
  }

  TEST_CASE("duplicate ids name both lines") {
    try {
      ingest_text(
          "{\"id\": \"a\", \"body\": \"x\", \"label\": \"toxic\"}\n"
          "{\"id\": \"b\", \"body\": \"y\", \"label\": \"toxic\"}\n"
          "{\"id\": \"a\", \"body\": \"z\", \"label\": \"toxic\"}\n",
          CorpusFormat::kLineRecords);
      FAIL("expected failure");
    } catch (const FormatError& e) {
      const std::string msg = e.what();
      CHECK(msg.find("'a'") != std::string::npos);
      CHECK(msg.find("1") != std::string::npos);
      CHECK(e.line() == 3);
    }
  }

  TEST_CASE("empty body fails at its line") {
    try {
      ingest_text(
          "{\"id\": \"a\", \"body\": \"x\", \"label\": \"toxic\"}\n"
          "{\"id\": \"b\", \"body\": \"  \", \"label\": \"toxic\"}\n",
          CorpusFormat::kLineRecords);
      FAIL("expected failure");
    } catch (const FormatError& e) {
      CHECK(e.line() == 2);
      CHECK(e.column() == "body");
    }
    CHECK_THROWS_AS(ingest_text("{not json}\n", CorpusFormat::kLineRecords), FormatError);
    CHECK_THROWS_AS(ingest_text("{\"id\": \"a\", \"body\": \"x\"}\n", CorpusFormat::kLineRecords), FormatError);
    CHECK_THROWS_AS(ingest_text("{\"id\": \"a\", \"body\": \"x\", \"label\": \"meh\"}\n", CorpusFormat::kLineRecords),
                    FormatError);
  }

  TEST_CASE("CSV variant with quoted fields") {
    const auto c = ingest_text(
        "id,body,label,categories\n"
        "a,\"multi\nline, with comma\",toxic,insult;profanity\n"
        "b,\"she said \"\"hi\"\"\",non_toxic,\n",
        CorpusFormat::kCsv);
    REQUIRE(c.records.size() == 2);
    CHECK(c.records[0].comment.body == "multi\nline, with comma");
    CHECK(c.records[0].categories == std::set<std::string>{"insult", "profanity"});
    CHECK(c.records[1].comment.body == "she said \"hi\"");
    CHECK_THROWS_AS(ingest_text("id,body\na,b\n", CorpusFormat::kCsv), FormatError);
    try {
      ingest_text("id,body,label\na,x,toxic\nb,,toxic\n", CorpusFormat::kCsv);
      FAIL("expected failure");
    } catch (const FormatError& e) {
      CHECK(e.line() == 3);
    }
    const auto rows = parse_csv("a,b\n\"x\ny\",z\nlast,row\n");
    REQUIRE(rows.size() == 3);
    CHECK(rows[2].line == 4);
  }

  TEST_CASE("unknown categories are rejected against the taxonomy") {
    const auto c = ingest_text("{\"id\": \"a\", \"body\": \"x\", \"label\": \"toxic\", \"categories\": [\"sarcasm\"]}\n",
                               CorpusFormat::kLineRecords);
    CHECK_THROWS_AS(validate_categories(c, testing::default_taxonomy()), ValidationError);
  }

  TEST_CASE("format detection and line-record round trip") {
    CHECK(format_for_path("x.csv") == CorpusFormat::kCsv);
    CHECK(format_for_path("x.jsonl") == CorpusFormat::kLineRecords);
    CHECK(parse_format("comma-separated") == CorpusFormat::kCsv);
    CHECK_THROWS_AS(parse_format("xml"), ConfigError);
    LabeledRecord r;
    r.comment = {"a", "body"};
    r.label = Label::kToxic;
    r.categories = std::set<std::string>{"insult"};
    const LabeledRecord back = parse_line_record(to_line_record(r).dump(), 1);
    CHECK(back.comment == r.comment);
    CHECK(back.label == r.label);
    CHECK(back.categories == r.categories);
  }

  TEST_CASE("shuffle is seeded and a permutation") {
    std::vector<std::string> ids;
    for (int i = 0; i < 100; ++i) ids.push_back("id" + std::to_string(i));
    const auto a = seeded_shuffle(ids, 42);
    CHECK(a == seeded_shuffle(ids, 42));
    std::vector<std::string> reversed(ids.rbegin(), ids.rend());
    CHECK(seeded_shuffle(reversed, 42) == a);
    CHECK(a != seeded_shuffle(ids, 43));
    auto sorted = a;
    std::sort(sorted.begin(), sorted.end());
    auto expected = ids;
    std::sort(expected.begin(), expected.end());
    CHECK(sorted == expected);
  }

  TEST_CASE("k-fold on the reported class counts") {
    const auto items = synthetic(10120, 28641);
    const SplitAssignment s = stratified_kfold(items, 10, 7);
    CHECK(s.scheme == "kfold:10");
    const auto t = tally(s, items);
    REQUIRE(t.size() == 10);
    int larger = 0;
    for (int f = 0; f < 10; ++f) {
      const auto& counts = t.at(fold_tag(f));
      CHECK(counts.at(Label::kToxic) == 1012);
      const std::size_t n = counts.at(Label::kNonToxic);
      CHECK((n == 2864 || n == 2865));
      larger += n == 2865;
    }
    CHECK(larger == 1);
  }

  TEST_CASE("k-fold degenerate and invalid cases") {
    const auto items = synthetic(5, 0);
    const SplitAssignment s = stratified_kfold(items, 5, 1);
    for (const auto& [tag, size] : s.sizes()) CHECK(size == 1);
    CHECK(s.sizes().size() == 5);
    CHECK_THROWS_AS(stratified_kfold(items, 1, 1), ValidationError);
    CHECK_THROWS_AS(stratified_kfold(items, 6, 1), ValidationError);
  }

  TEST_CASE("holdout sizes by largest remainder") {
    CHECK(holdout_sizes(10, {8, 1, 1}) == std::array<std::size_t, 3>{8, 1, 1});
    CHECK(holdout_sizes(38761, {8, 1, 1}) == std::array<std::size_t, 3>{31009, 3876, 3876});
    CHECK(holdout_sizes(10120, {8, 1, 1}) == std::array<std::size_t, 3>{8096, 1012, 1012});
    CHECK(holdout_sizes(28641, {8, 1, 1}) == std::array<std::size_t, 3>{22913, 2864, 2864});
    CHECK(holdout_sizes(2, {1, 1, 1}) == std::array<std::size_t, 3>{1, 1, 0});
  }

  TEST_CASE("holdout on the reported corpus") {
    const auto items = synthetic(10120, 28641);
    const SplitAssignment s = holdout_split(items, {8, 1, 1}, 3);
    const auto sizes = s.sizes();
    CHECK(sizes.at("train") == 31009);
    CHECK(sizes.at("validation") == 3876);
    CHECK(sizes.at("test") == 3876);
    const auto t = tally(s, items);
    CHECK(t.at("train").at(Label::kToxic) == 8096);
    CHECK(t.at("validation").at(Label::kToxic) == 1012);
    CHECK(t.at("test").at(Label::kNonToxic) == 2864);
  }

  TEST_CASE("holdout small and deterministic") {
    const auto items = synthetic(10, 0);
    const SplitAssignment a = holdout_split(items, {8, 1, 1}, 9);
    CHECK(a.sizes() == std::map<std::string, std::size_t>{{"train", 8}, {"validation", 1}, {"test", 1}});
    CHECK(a.tags == holdout_split(items, {8, 1, 1}, 9).tags);
    CHECK_THROWS_AS(holdout_split(std::span<const IdLabel>{}, {8, 1, 1}, 9), ValidationError);
  }

  TEST_CASE("split properties over random corpora") {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 40; ++trial) {
      const std::size_t toxic = 10 + rng() % 200, clean = 10 + rng() % 400;
      const int k = 2 + static_cast<int>(rng() % 9);
      const auto items = synthetic(toxic, clean);
      const SplitAssignment s = stratified_kfold(items, k, rng());
      CHECK(s.tags.size() == items.size());
      const auto t = tally(s, items);
      for (Label label : {Label::kToxic, Label::kNonToxic}) {
        std::size_t lo = SIZE_MAX, hi = 0;
        for (const auto& [tag, counts] : t) {
          const std::size_t n = counts.count(label) ? counts.at(label) : 0;
          lo = std::min(lo, n);
          hi = std::max(hi, n);
        }
        CHECK(hi - lo <= 1);
      }
      const auto h = holdout_split(items, {8, 1, 1}, rng());
      std::size_t total = 0;
      for (const auto& [tag, n] : h.sizes()) total += n;
      CHECK(total == items.size());
    }
  }

  TEST_CASE("ratios and split file rendering") {
    CHECK(parse_ratios("8:1:1") == std::array<int, 3>{8, 1, 1});
    CHECK_THROWS_AS(parse_ratios("8:1"), ConfigError);
    CHECK_THROWS_AS(parse_ratios("0:0:0"), ConfigError);
    CHECK_THROWS_AS(parse_ratios("a:b:c"), ConfigError);
    SplitAssignment s;
    s.tags = {{"b", "test"}, {"a", "train"}};
    CHECK(render_split(s) == "a\ttrain\nb\ttest\n");
  }
}

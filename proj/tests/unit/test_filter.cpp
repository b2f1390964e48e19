#include "helpers.h"

#include "revguard/core/errors.h"
#include "revguard/filter/toxicity_filter.h"

#include <doctest.h>

#include <cmath>

using namespace revguard;
using namespace revguard::filter;
using backend::Lexicon;
using backend::LexiconScorer;

namespace {

std::shared_ptr<backend::BackendRegistry> registry_with_scorer(const std::string& lexicon_text, const std::string& id) {
  auto registry = std::make_shared<backend::BackendRegistry>();
  registry->add_scorer(std::make_shared<LexiconScorer>(Lexicon::parse(lexicon_text), id));
  return registry;
}

// Scores a fixed number taken from the text itself ("s=0.8 ...").
class NumberScorer final : public backend::ScoringBackend {
 public:
  const std::string& id() const override { return id_; }
  double score(std::string_view text) override { return std::stod(std::string(text.substr(2, 4))); }

 private:
  std::string id_ = "numbers";
};

}  // namespace

TEST_SUITE("filter") {
  TEST_CASE("clean comment is non-toxic with zero confidence") {
    backend::BackendRegistry registry;
    const Verdict v = classify({"c1", "LGTM, thanks!"}, FilterConfig{}, registry);
    CHECK(v.label == Label::kNonToxic);
    CHECK(v.confidence == 0.0);
    CHECK(v.backend_id == "lexicon");
    CHECK(v.threshold == 0.5);
  }

  TEST_CASE("confidence equal to threshold is toxic") {
    auto registry = registry_with_scorer("meh\t0.5\n", "half");
    FilterConfig cfg;
    cfg.backend_id = "half";
    const Verdict v = classify({"c1", "meh"}, cfg, *registry);
    CHECK(v.confidence == 0.5);
    CHECK(v.label == Label::kToxic);
    CHECK(label_for(0.5, 0.5) == Label::kToxic);
    CHECK(label_for(std::nextafter(0.5, 0.0), 0.5) == Label::kNonToxic);
  }

  TEST_CASE("identifier false positive is flagged") {
    backend::BackendRegistry registry;
    const Verdict v = classify(
        {"fp", "I'd change it to 'is_disgusting_for', as the current name implies it returns a boolean."},
        FilterConfig{}, registry);
    CHECK(v.label == Label::kToxic);
  }

  TEST_CASE("code spans are neutralized before scoring") {
    backend::BackendRegistry registry;
    const std::string body = "Please rename `kill_yourself_flag` before merging.";
    CHECK(prepare_text(body, FilterConfig{}) == "Please rename [code] before merging.");
    CHECK(classify_text(body, FilterConfig{}, registry).label == Label::kNonToxic);
    FilterConfig raw;
    raw.normalize_code_spans = false;
    CHECK(classify_text(body, raw, registry).label == Label::kToxic);
  }

  TEST_CASE("invalid input and config") {
    backend::BackendRegistry registry;
    CHECK_THROWS_AS(classify({"c", "   "}, FilterConfig{}, registry), ValidationError);
    FilterConfig bad;
    bad.threshold = 1.5;
    CHECK_THROWS_AS(validate(bad), ConfigError);
    FilterConfig missing;
    missing.backend_id = "nope";
    CHECK_THROWS_AS(classify({"c", "text"}, missing, registry), StageError);
  }

  TEST_CASE("score is monotone in added profanity") {
    backend::BackendRegistry registry;
    const double one = classify_text("this is crap", FilterConfig{}, registry).confidence;
    const double two = classify_text("this is crap and shit", FilterConfig{}, registry).confidence;
    CHECK(two >= one);
    CHECK(one > 0.0);
  }

  TEST_CASE("calibration picks the largest tied threshold") {
    const std::vector<ScoredLabel> scored = {
        {0.9, Label::kToxic}, {0.8, Label::kToxic}, {0.1, Label::kNonToxic}, {0.2, Label::kNonToxic}};
    const double t = calibrate_threshold_scores(scored, 0.05);
    CHECK(t == 0.8);
    for (const auto& [s, label] : scored) CHECK((label_for(s, t) == label));
  }

  TEST_CASE("calibration through a backend") {
    auto registry = std::make_shared<backend::BackendRegistry>();
    registry->add_scorer(std::make_shared<NumberScorer>());
    FilterConfig cfg;
    cfg.backend_id = "numbers";
    cfg.normalize_code_spans = false;
    const std::vector<std::pair<CommentRecord, Label>> labeled = {{{"a", "s=0.90"}, Label::kToxic},
                                                                  {{"b", "s=0.80"}, Label::kToxic},
                                                                  {{"c", "s=0.10"}, Label::kNonToxic},
                                                                  {{"d", "s=0.20"}, Label::kNonToxic}};
    CHECK(calibrate_threshold(labeled, cfg, *registry, 0.05) == 0.8);
  }

  TEST_CASE("calibration guards") {
    const std::vector<ScoredLabel> one_class = {{0.9, Label::kToxic}, {0.3, Label::kToxic}};
    CHECK_THROWS_AS(calibrate_threshold_scores(one_class, 0.05), ValidationError);
    const std::vector<ScoredLabel> ok = {{0.9, Label::kToxic}, {0.3, Label::kNonToxic}};
    CHECK_THROWS_AS(calibrate_threshold_scores(ok, 0.0), ValidationError);
    CHECK_THROWS_AS(calibrate_threshold_scores({}, 0.1), ValidationError);
  }

  TEST_CASE("style judge and STA") {
    backend::BackendRegistry registry;
    const auto judge = make_style_judge(FilterConfig{}, registry);
    CHECK(judge("Thanks, looks good."));
    CHECK_FALSE(judge("this is shit"));
    const std::vector<metrics::TextPair> pairs = {{"this is shit", "this is not great"}, {"you idiot", "you idiot"}};
    CHECK(sta(pairs, FilterConfig{}, registry) == 0.5);
  }
}

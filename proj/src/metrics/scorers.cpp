#include "revguard/metrics/scorers.h"

#include "revguard/core/text.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <set>
#include <vector>

namespace revguard::metrics {

namespace {

const std::set<std::string, std::less<>>& stop_words() {
  static const std::set<std::string, std::less<>> words = {
      "a",     "about", "above", "after", "again", "all",    "am",    "an",    "and",   "any",   "are",
      "as",    "at",    "be",    "been",  "being", "both",   "but",   "by",    "can",   "could", "did",
      "do",    "does",  "doing", "down",  "during", "each",  "few",   "for",   "from",  "further", "had",
      "has",   "have",  "having", "he",   "her",   "here",   "hers",  "him",   "his",   "how",   "i",
      "if",    "in",    "into",  "is",    "it",    "its",    "itself", "just", "me",    "more",  "most",
      "my",    "myself", "no",   "nor",   "not",   "now",    "of",    "off",   "on",    "once",  "only",
      "or",    "other", "our",   "ours",  "out",   "over",   "own",   "s",     "same",  "she",   "should",
      "so",    "some",  "such",  "t",     "than",  "that",   "the",   "their", "them",  "then",  "there",
      "these", "they",  "this",  "those", "through", "to",   "too",   "under", "until", "up",    "very",
      "was",   "we",    "were",  "what",  "when",  "where",  "which", "while", "who",   "whom",  "why",
      "will",  "with",  "would", "you",   "your",  "yours",  "d",     "ll",    "m",     "re",    "ve",
      "please", "also", "it's", "i'd",    "i'm",   "don't",  "let",   "lets"};
  return words;
}

bool is_identifier_char(unsigned char c) { return std::isalnum(c) || c == '_' || c >= 0x80; }

// Splits prose into lowercase identifier-like words.
template <typename Fn>
void for_each_prose_word(std::string_view prose, Fn&& fn) {
  std::string word;
  for (unsigned char c : prose) {
    if (is_identifier_char(c)) {
      word.push_back(static_cast<char>(std::tolower(c)));
    } else if (!word.empty()) {
      fn(word);
      word.clear();
    }
  }
  if (!word.empty()) fn(word);
}

std::string strip_backticks(std::string_view code) {
  std::size_t b = 0;
  std::size_t e = code.size();
  while (b < e && code[b] == '`') ++b;
  while (e > b && code[e - 1] == '`') --e;
  return std::string(text::trim(code.substr(b, e - b)));
}

bool is_vowel(char c) {
  switch (std::tolower(static_cast<unsigned char>(c))) {
    case 'a': case 'e': case 'i': case 'o': case 'u': case 'y':
      return true;
    default:
      return false;
  }
}

}  // namespace

bool BagOfWordsCosine::is_stop_word(std::string_view word) { return stop_words().count(word) > 0; }

std::map<std::string, double> BagOfWordsCosine::term_frequencies(std::string_view input) {
  const std::string normalized = text::normalize(input);
  std::map<std::string, double> tf;
  std::size_t pos = 0;
  auto add_prose = [&](std::string_view prose) {
    for_each_prose_word(prose, [&](const std::string& w) {
      if (!is_stop_word(w)) tf[w] += 1.0;
    });
  };
  for (const text::CodeSpan& span : text::find_code_spans(normalized)) {
    add_prose(std::string_view(normalized).substr(pos, span.offset - pos));
    std::string code = strip_backticks(span.text);
    if (!code.empty()) tf["`" + code + "`"] += 1.0;
    pos = span.offset + span.text.size();
  }
  add_prose(std::string_view(normalized).substr(pos));
  return tf;
}

double BagOfWordsCosine::similarity(std::string_view source, std::string_view rewrite) const {
  if (text::normalize(source) == text::normalize(rewrite)) return 1.0;
  const auto a = term_frequencies(source);
  const auto b = term_frequencies(rewrite);
  if (a.empty() || b.empty()) return 0.0;
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (const auto& [term, w] : a) {
    na += w * w;
    if (auto it = b.find(term); it != b.end()) dot += w * it->second;
  }
  for (const auto& [term, w] : b) nb += w * w;
  return std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), 0.0, 1.0);
}

bool RuleBasedFluency::plausible_word(std::string_view word) {
  if (word.empty() || word.size() > 24) return false;
  bool has_alpha = false, has_vowel = false, has_digit = false, has_underscore = false, has_upper_inner = false;
  int run = 1;
  for (std::size_t i = 0; i < word.size(); ++i) {
    const unsigned char c = static_cast<unsigned char>(word[i]);
    if (c >= 0x80) return true;  // non-ASCII words are not judged
    if (std::isalpha(c)) has_alpha = true;
    if (is_vowel(static_cast<char>(c))) has_vowel = true;
    if (std::isdigit(c)) has_digit = true;
    if (c == '_') has_underscore = true;
    if (i > 0 && std::isupper(c)) has_upper_inner = true;
    if (i > 0 && std::tolower(c) == std::tolower(static_cast<unsigned char>(word[i - 1])) && std::isalpha(c)) {
      if (++run >= 3) return false;  // "sooo", "aaargh"
    } else {
      run = 1;
    }
  }
  if (!has_alpha) return true;                                     // numbers, versions
  if (has_digit || has_underscore || has_upper_inner) return true;  // identifiers
  return has_vowel || word.size() <= 2;
}

double RuleBasedFluency::fluency(std::string_view input) const {
  const std::string normalized = text::normalize(input);
  const std::string_view trimmed = text::trim(normalized);
  if (trimmed.empty()) return 0.0;

  const std::string prose = text::replace_code_spans(trimmed, " ");
  std::size_t words = 0, plausible = 0;
  std::string word;
  auto flush = [&] {
    if (word.empty()) return;
    ++words;
    if (plausible_word(word)) ++plausible;
    word.clear();
  };
  for (char c : prose) {
    const unsigned char u = static_cast<unsigned char>(c);
    if (is_identifier_char(u) || c == '\'') word.push_back(c);
    else flush();
  }
  flush();
  const double word_share = words == 0 ? 1.0 : static_cast<double>(plausible) / static_cast<double>(words);

  const unsigned char first = static_cast<unsigned char>(trimmed.front());
  const unsigned char last = static_cast<unsigned char>(trimmed.back());
  const bool start_ok = !std::isalpha(first) || std::isupper(first);
  const bool end_ok = std::string_view(".!?)`'\"").find(static_cast<char>(last)) != std::string_view::npos || last >= 0x80;
  int depth_round = 0, depth_square = 0;
  bool balanced = true;
  for (char c : prose) {
    if (c == '(') ++depth_round;
    if (c == ')' && --depth_round < 0) balanced = false;
    if (c == '[') ++depth_square;
    if (c == ']' && --depth_square < 0) balanced = false;
  }
  balanced = balanced && depth_round == 0 && depth_square == 0;
  const double boundary = (static_cast<double>(start_ok) + end_ok + balanced) / 3.0;

  return std::clamp(0.8 * word_share + 0.2 * boundary, 0.0, 1.0);
}

}  // namespace revguard::metrics

#include "revguard/backend/lexicon.h"

#include "revguard/core/errors.h"
#include "revguard/core/text.h"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

namespace revguard::backend {

namespace {

// term, weight. Strong profanity near 0.9, insults 0.6-0.8, mild
// negativity below the default 0.5 threshold so it only counts in
// combination.
constexpr std::pair<const char*, double> kBuiltinTerms[] = {
    {"fuck", 0.9},        {"fucking", 0.9},      {"fucked", 0.9},      {"fucker", 0.95},
    {"motherfucker", 0.95}, {"wtf", 0.7},        {"stfu", 0.9},        {"shit", 0.85},
    {"shitty", 0.85},     {"bullshit", 0.85},    {"horseshit", 0.85},  {"dipshit", 0.9},
    {"asshole", 0.9},     {"ass", 0.6},          {"jackass", 0.85},    {"dumbass", 0.9},
    {"bitch", 0.9},       {"bastard", 0.85},     {"dick", 0.7},        {"piss", 0.6},
    {"pissed", 0.5},      {"crap", 0.6},         {"crappy", 0.6},      {"damn", 0.5},
    {"dammit", 0.5},      {"goddamn", 0.6},      {"hell", 0.35},       {"go to hell", 0.9},
    {"idiot", 0.8},       {"idiots", 0.8},       {"idiotic", 0.8},     {"moron", 0.85},
    {"moronic", 0.85},    {"imbecile", 0.85},    {"stupid", 0.7},      {"stupidity", 0.7},
    {"dumb", 0.65},       {"brain dead", 0.8},   {"braindead", 0.8},   {"incompetent", 0.7},
    {"clueless", 0.6},    {"pathetic", 0.7},     {"loser", 0.7},       {"clown", 0.55},
    {"jerk", 0.6},        {"garbage", 0.6},      {"trash", 0.5},       {"sucks", 0.55},
    {"suck", 0.4},        {"disgusting", 0.6},   {"disgusted", 0.5},   {"worthless", 0.6},
    {"useless", 0.5},     {"shut up", 0.7},      {"screw you", 0.85},  {"get lost", 0.6},
    {"kill yourself", 1.0}, {"lazy", 0.4},       {"ridiculous", 0.4},  {"nonsense", 0.4},
    {"embarrassing", 0.4}, {"hate", 0.4},        {"awful", 0.35},      {"terrible", 0.35},
};

double parse_weight(std::string_view s, std::size_t line_no) {
  s = text::trim(s);
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    throw ConfigError("lexicon line " + std::to_string(line_no) + ": bad weight '" + std::string(s) + "'");
  }
  return value;
}

std::vector<std::string> split_tokens(const std::string& normalized) {
  std::vector<std::string> tokens;
  std::istringstream in(normalized);
  for (std::string tok; in >> tok;) tokens.push_back(std::move(tok));
  return tokens;
}

}  // namespace

Lexicon::Lexicon(std::vector<LexiconTerm> terms) {
  std::map<std::string, double> merged;
  for (LexiconTerm& t : terms) {
    std::string key = lexicon_normalize(t.term);
    if (key.empty()) throw ConfigError("lexicon term '" + t.term + "' is empty after normalization");
    if (!(t.weight > 0.0 && t.weight <= 1.0)) {
      throw ConfigError("lexicon term '" + t.term + "' has weight outside (0,1]");
    }
    auto [it, inserted] = merged.emplace(key, t.weight);
    if (!inserted) it->second = std::max(it->second, t.weight);
  }
  if (merged.empty()) throw ConfigError("lexicon is empty");
  for (auto& [term, weight] : merged) terms_.push_back({term, weight});
}

Lexicon Lexicon::parse(std::string_view content) {
  std::vector<LexiconTerm> terms;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= content.size()) {
    std::size_t end = content.find('\n', pos);
    if (end == std::string_view::npos) end = content.size();
    std::string_view line = content.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = text::trim(line);
    if (line.empty()) continue;
    std::size_t sep = line.find_last_of("\t,");
    if (sep == std::string_view::npos) {
      terms.push_back({std::string(line), 0.5});
    } else {
      terms.push_back({std::string(text::trim(line.substr(0, sep))), parse_weight(line.substr(sep + 1), line_no)});
    }
  }
  return Lexicon(std::move(terms));
}

Lexicon Lexicon::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open lexicon file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

const Lexicon& Lexicon::builtin() {
  static const Lexicon lexicon = [] {
    std::vector<LexiconTerm> terms;
    for (const auto& [term, weight] : kBuiltinTerms) terms.push_back({term, weight});
    return Lexicon(std::move(terms));
  }();
  return lexicon;
}

std::string lexicon_normalize(std::string_view input) {
  const std::string normalized = text::normalize(input);
  std::string out;
  out.reserve(normalized.size());
  bool pending_space = false;
  for (unsigned char c : normalized) {
    const bool keep = c >= 0x80 || std::isalnum(c);
    if (!keep) {
      pending_space = true;
      continue;
    }
    if (pending_space && !out.empty()) out.push_back(' ');
    pending_space = false;
    out.push_back(static_cast<char>(std::tolower(c)));
  }
  return out;
}

std::vector<LexiconTerm> matched_terms(std::string_view input, const Lexicon& lexicon) {
  const std::vector<std::string> tokens = split_tokens(lexicon_normalize(input));
  std::vector<LexiconTerm> found;
  for (const LexiconTerm& term : lexicon.terms()) {
    const std::vector<std::string> needle = split_tokens(term.term);
    if (needle.empty() || needle.size() > tokens.size()) continue;
    auto it = std::search(tokens.begin(), tokens.end(), needle.begin(), needle.end());
    if (it != tokens.end()) found.push_back(term);
  }
  return found;
}

double classify_lexicon(std::string_view input, const Lexicon& lexicon) {
  double keep = 1.0;
  for (const LexiconTerm& term : matched_terms(input, lexicon)) keep *= 1.0 - term.weight;
  return std::clamp(1.0 - keep, 0.0, 1.0);
}

LexiconScorer::LexiconScorer(Lexicon lexicon, std::string id) : lexicon_(std::move(lexicon)), id_(std::move(id)) {}

}  // namespace revguard::backend

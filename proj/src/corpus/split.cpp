#include "revguard/corpus/split.h"

#include "revguard/core/errors.h"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <limits>
#include <random>
#include <set>

namespace revguard::corpus {

namespace {

// Uniform draw from [0, bound] without modulo bias.
std::uint64_t uniform_upto(std::mt19937_64& rng, std::uint64_t bound) {
  if (bound == std::numeric_limits<std::uint64_t>::max()) return rng();
  const std::uint64_t range = bound + 1;
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % range;
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % range;
}

void shuffle_in_place(std::vector<std::string>& ids, std::mt19937_64& rng) {
  std::sort(ids.begin(), ids.end());
  for (std::size_t i = ids.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(uniform_upto(rng, i - 1));
    std::swap(ids[i - 1], ids[j]);
  }
}

// Members of each class, toxic first. Throws on duplicate ids.
std::array<std::vector<std::string>, 2> by_class(std::span<const IdLabel> items) {
  std::array<std::vector<std::string>, 2> classes;
  std::set<std::string_view> seen;
  for (const auto& [id, label] : items) {
    if (!seen.insert(id).second) throw ValidationError("duplicate id '" + id + "' in split input");
    classes[label == Label::kToxic ? 0 : 1].push_back(id);
  }
  return classes;
}

std::vector<IdLabel> id_labels(const LabeledCorpus& corpus) {
  std::vector<IdLabel> out;
  out.reserve(corpus.records.size());
  for (const LabeledRecord& r : corpus.records) out.emplace_back(r.comment.id, r.label);
  return out;
}

}  // namespace

std::map<std::string, std::size_t> SplitAssignment::sizes() const {
  std::map<std::string, std::size_t> out;
  for (const auto& [id, tag] : tags) ++out[tag];
  return out;
}

std::vector<std::string> seeded_shuffle(std::vector<std::string> ids, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  shuffle_in_place(ids, rng);
  return ids;
}

std::string fold_tag(int fold) { return "fold" + std::to_string(fold); }

SplitAssignment stratified_kfold(std::span<const IdLabel> items, int k, std::uint64_t seed) {
  if (k < 2) throw ValidationError("k must be at least 2");
  auto classes = by_class(items);
  for (std::size_t c = 0; c < classes.size(); ++c) {
    if (!classes[c].empty() && classes[c].size() < static_cast<std::size_t>(k)) {
      throw ValidationError("class '" + std::string(to_string(c == 0 ? Label::kToxic : Label::kNonToxic)) + "' has " +
                            std::to_string(classes[c].size()) + " members, fewer than k=" + std::to_string(k));
    }
  }

  SplitAssignment split;
  split.seed = seed;
  split.scheme = "kfold:" + std::to_string(k);
  std::mt19937_64 rng(seed);
  std::size_t offset = 0;
  for (auto& members : classes) {
    shuffle_in_place(members, rng);
    for (std::size_t i = 0; i < members.size(); ++i) {
      split.tags[members[i]] = fold_tag(static_cast<int>((offset + i) % static_cast<std::size_t>(k)));
    }
    offset = (offset + members.size()) % static_cast<std::size_t>(k);
  }
  return split;
}

SplitAssignment stratified_kfold(const LabeledCorpus& corpus, int k, std::uint64_t seed) {
  const auto items = id_labels(corpus);
  return stratified_kfold(items, k, seed);
}

std::array<std::size_t, 3> holdout_sizes(std::size_t n, const std::array<int, 3>& ratios) {
  std::uint64_t total = 0;
  for (int r : ratios) {
    if (r <= 0) throw ValidationError("split ratios must be positive");
    total += static_cast<std::uint64_t>(r);
  }
  std::array<std::size_t, 3> sizes{};
  std::array<std::uint64_t, 3> remainder{};
  std::size_t assigned = 0;
  for (std::size_t i = 0; i < 3; ++i) {
    const std::uint64_t scaled = static_cast<std::uint64_t>(n) * static_cast<std::uint64_t>(ratios[i]);
    sizes[i] = static_cast<std::size_t>(scaled / total);
    remainder[i] = scaled % total;
    assigned += sizes[i];
  }
  std::array<std::size_t, 3> order = {0, 1, 2};
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return remainder[a] > remainder[b]; });
  for (std::size_t i = 0; assigned < n; ++i, ++assigned) ++sizes[order[i]];
  return sizes;
}

SplitAssignment holdout_split(std::span<const IdLabel> items, const std::array<int, 3>& ratios, std::uint64_t seed) {
  if (items.empty()) throw ValidationError("cannot split an empty corpus");
  auto classes = by_class(items);
  SplitAssignment split;
  split.seed = seed;
  split.scheme =
      "holdout:" + std::to_string(ratios[0]) + ":" + std::to_string(ratios[1]) + ":" + std::to_string(ratios[2]);
  std::mt19937_64 rng(seed);
  for (auto& members : classes) {
    shuffle_in_place(members, rng);
    const auto sizes = holdout_sizes(members.size(), ratios);
    std::size_t pos = 0;
    for (std::size_t part = 0; part < 3; ++part) {
      for (std::size_t i = 0; i < sizes[part]; ++i) split.tags[members[pos++]] = std::string(kHoldoutTags[part]);
    }
  }
  return split;
}

SplitAssignment holdout_split(const LabeledCorpus& corpus, const std::array<int, 3>& ratios, std::uint64_t seed) {
  const auto items = id_labels(corpus);
  return holdout_split(items, ratios, seed);
}

std::array<int, 3> parse_ratios(std::string_view text) {
  std::array<int, 3> out{};
  std::size_t pos = 0;
  for (std::size_t i = 0; i < 3; ++i) {
    const std::size_t end = i < 2 ? text.find(':', pos) : text.size();
    if (end == std::string_view::npos) throw ConfigError("ratios must look like 8:1:1");
    const std::string_view part = text.substr(pos, end - pos);
    auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), out[i]);
    if (ec != std::errc{} || ptr != part.data() + part.size() || out[i] <= 0) {
      throw ConfigError("ratios must look like 8:1:1");
    }
    pos = end + 1;
  }
  return out;
}

std::string render_split(const SplitAssignment& split) {
  std::string out;
  for (const auto& [id, tag] : split.tags) out += id + "\t" + tag + "\n";
  return out;
}

void write_split_file(const std::string& path, const SplitAssignment& split) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ValidationError("cannot write '" + path + "'");
  out << render_split(split);
  if (!out) throw ValidationError("failed writing '" + path + "'");
}

}  // namespace revguard::corpus

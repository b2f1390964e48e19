#pragma once

#include "revguard/corpus/corpus.h"

#include <array>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace revguard::corpus {

struct SplitAssignment {
  std::map<std::string, std::string> tags;  // record id -> partition tag
  std::uint64_t seed = 0;
  std::string scheme;  // "kfold:10", "holdout:8:1:1"

  std::map<std::string, std::size_t> sizes() const;
};

// Sorts ids, then Fisher-Yates with mt19937_64(seed): for i from n-1 down
// to 1, j is drawn uniformly from [0, i] by rejection sampling on the raw
// 64-bit output. Platform independent.
std::vector<std::string> seeded_shuffle(std::vector<std::string> ids, std::uint64_t seed);

std::string fold_tag(int fold);  // "fold3"
inline constexpr std::array<std::string_view, 3> kHoldoutTags = {"train", "validation", "test"};

using IdLabel = std::pair<std::string, Label>;

// Per class (toxic first), shuffled members are dealt round-robin to folds,
// starting where the previous class stopped. Fold sizes per class differ by
// at most one. Throws ValidationError when k < 2 or a present class has
// fewer than k members.
SplitAssignment stratified_kfold(std::span<const IdLabel> items, int k, std::uint64_t seed);
SplitAssignment stratified_kfold(const LabeledCorpus& corpus, int k, std::uint64_t seed);

// Per class partition sizes by largest remainder of n * r_i / sum(r), ties
// to the earlier partition; shuffled members fill train, validation, test
// in order.
std::array<std::size_t, 3> holdout_sizes(std::size_t n, const std::array<int, 3>& ratios);
SplitAssignment holdout_split(std::span<const IdLabel> items, const std::array<int, 3>& ratios, std::uint64_t seed);
SplitAssignment holdout_split(const LabeledCorpus& corpus, const std::array<int, 3>& ratios, std::uint64_t seed);

// Parses "8:1:1".
std::array<int, 3> parse_ratios(std::string_view text);

// "id<TAB>tag" lines sorted by id.
std::string render_split(const SplitAssignment& split);
void write_split_file(const std::string& path, const SplitAssignment& split);

}  // namespace revguard::corpus

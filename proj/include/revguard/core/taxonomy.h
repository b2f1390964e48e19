#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace revguard {

struct CategoryDef {
  std::string id;  // lowercase slug
  std::string display_name;
  std::string definition;
  std::vector<std::string> exemplars;
  bool is_non_toxic_marker = false;
  // Where the category definition comes from, e.g. "attested" or
  // "external-taxonomy". Informational only.
  std::string provenance;

  bool operator==(const CategoryDef&) const = default;
};

// Ordered set of sub-categories with exactly one non-toxic marker and at
// least one toxic category. Construct through load_taxonomy() or
// Taxonomy::create(), both of which validate.
class Taxonomy {
 public:
  static Taxonomy create(std::string version, std::vector<CategoryDef> categories);

  const std::string& version() const { return version_; }
  const std::vector<CategoryDef>& categories() const { return categories_; }

  const CategoryDef* find(std::string_view id) const;
  bool contains(std::string_view id) const { return find(id) != nullptr; }
  const CategoryDef& marker() const { return categories_[marker_index_]; }

  // Toxic categories in declaration order (marker excluded).
  std::vector<const CategoryDef*> toxic_categories() const;
  std::size_t toxic_count() const { return categories_.size() - 1; }

  bool operator==(const Taxonomy& other) const {
    return version_ == other.version_ && categories_ == other.categories_;
  }

 private:
  Taxonomy() = default;

  std::string version_;
  std::vector<CategoryDef> categories_;
  std::size_t marker_index_ = 0;
};

// Parses a JSON taxonomy document:
//   {"version": "...", "categories": [{"id", "display_name", "definition",
//     "exemplars": [...], "is_non_toxic_marker": bool, "provenance"?}]}
// Ids are normalized to slugs. Throws ConfigError on malformed input,
// duplicate ids, empty exemplar lists, or a missing/duplicated marker.
Taxonomy load_taxonomy(std::string_view config_text);
Taxonomy load_taxonomy_file(const std::string& path);

std::string serialize_taxonomy(const Taxonomy& taxonomy);

}  // namespace revguard

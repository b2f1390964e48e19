#include "revguard/core/taxonomy.h"

#include "revguard/core/errors.h"
#include "revguard/core/text.h"

#include <json.hpp>

#include <fstream>
#include <set>
#include <sstream>

namespace revguard {

using nlohmann::json;

Taxonomy Taxonomy::create(std::string version, std::vector<CategoryDef> categories) {
  std::set<std::string> seen;
  std::optional<std::size_t> marker;
  for (std::size_t i = 0; i < categories.size(); ++i) {
    CategoryDef& def = categories[i];
    def.id = text::to_slug(def.id);
    if (def.id.empty()) throw ConfigError("category #" + std::to_string(i) + " has an empty id");
    if (!seen.insert(def.id).second) throw ConfigError("duplicate category id '" + def.id + "'");
    if (def.exemplars.empty()) throw ConfigError("category '" + def.id + "' has no exemplars");
    if (def.display_name.empty()) def.display_name = def.id;
    if (def.is_non_toxic_marker) {
      if (marker) throw ConfigError("more than one non-toxic marker ('" + categories[*marker].id + "', '" + def.id + "')");
      marker = i;
    }
  }
  if (!marker) throw ConfigError("taxonomy has no non-toxic marker category");
  if (categories.size() < 2) throw ConfigError("taxonomy needs at least one toxic category");

  Taxonomy t;
  t.version_ = std::move(version);
  t.categories_ = std::move(categories);
  t.marker_index_ = *marker;
  return t;
}

const CategoryDef* Taxonomy::find(std::string_view id) const {
  for (const CategoryDef& def : categories_) {
    if (def.id == id) return &def;
  }
  return nullptr;
}

std::vector<const CategoryDef*> Taxonomy::toxic_categories() const {
  std::vector<const CategoryDef*> out;
  for (const CategoryDef& def : categories_) {
    if (!def.is_non_toxic_marker) out.push_back(&def);
  }
  return out;
}

Taxonomy load_taxonomy(std::string_view config_text) {
  json doc;
  try {
    doc = json::parse(config_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("malformed taxonomy config: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("categories") || !doc["categories"].is_array()) {
    throw ConfigError("taxonomy config needs a 'categories' array");
  }
  std::vector<CategoryDef> categories;
  try {
    for (const json& item : doc["categories"]) {
      CategoryDef def;
      def.id = item.at("id").get<std::string>();
      def.display_name = item.value("display_name", std::string{});
      def.definition = item.value("definition", std::string{});
      if (item.contains("exemplars")) def.exemplars = item.at("exemplars").get<std::vector<std::string>>();
      def.is_non_toxic_marker = item.value("is_non_toxic_marker", false);
      def.provenance = item.value("provenance", std::string{});
      categories.push_back(std::move(def));
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed taxonomy category: ") + e.what());
  }
  return Taxonomy::create(doc.value("version", std::string{"unversioned"}), std::move(categories));
}

Taxonomy load_taxonomy_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open taxonomy file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return load_taxonomy(buf.str());
}

std::string serialize_taxonomy(const Taxonomy& taxonomy) {
  json cats = json::array();
  for (const CategoryDef& def : taxonomy.categories()) {
    json item = {{"id", def.id},
                 {"display_name", def.display_name},
                 {"definition", def.definition},
                 {"exemplars", def.exemplars},
                 {"is_non_toxic_marker", def.is_non_toxic_marker}};
    if (!def.provenance.empty()) item["provenance"] = def.provenance;
    cats.push_back(std::move(item));
  }
  json doc = {{"version", taxonomy.version()}, {"categories", std::move(cats)}};
  return doc.dump(2);
}

}  // namespace revguard

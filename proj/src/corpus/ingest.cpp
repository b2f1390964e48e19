#include "revguard/corpus/corpus.h"

#include "revguard/core/json_io.h"
#include "revguard/core/text.h"

#include <fstream>
#include <map>
#include <sstream>

namespace revguard::corpus {

using nlohmann::json;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot read '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string string_field(const json& j, const char* key, std::size_t line_no, bool required) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) {
    if (required) throw FormatError(line_no, key, "missing required field");
    return {};
  }
  if (!it->is_string()) throw FormatError(line_no, key, "expected a string");
  return it->get<std::string>();
}

std::optional<std::string> optional_field(const json& j, const char* key, std::size_t line_no) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return string_field(j, key, line_no, true);
}

void check_comment(const CommentRecord& c, std::size_t line_no) {
  if (text::is_blank(c.id)) throw FormatError(line_no, "id", "empty id");
  if (text::is_blank(c.body)) throw FormatError(line_no, "body", "empty body");
}

Label label_at(std::string_view value, std::size_t line_no) {
  try {
    return parse_label(value);
  } catch (const ValidationError& e) {
    throw FormatError(line_no, "label", e.what());
  }
}

std::set<std::string> split_categories(std::string_view text) {
  std::set<std::string> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find(';', start);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view part = text::trim(text.substr(start, end - start));
    if (!part.empty()) out.insert(text::to_slug(part));
    start = end + 1;
  }
  return out;
}

json parse_object(std::string_view line, std::size_t line_no) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::parse_error& e) {
    throw FormatError(line_no, "", std::string("malformed record: ") + e.what());
  }
  if (!j.is_object()) throw FormatError(line_no, "", "record is not an object");
  return j;
}

CommentRecord comment_from_object(const json& j, std::size_t line_no) {
  CommentRecord c;
  c.id = string_field(j, "id", line_no, true);
  c.body = string_field(j, "body", line_no, true);
  c.source = optional_field(j, "source", line_no);
  c.author = optional_field(j, "author", line_no);
  c.created_at = optional_field(j, "created_at", line_no);
  c.context = optional_field(j, "context", line_no);
  check_comment(c, line_no);
  return c;
}

void add_unique(LabeledCorpus& corpus, std::map<std::string, std::size_t>& seen, LabeledRecord record,
                std::size_t line_no) {
  auto [it, inserted] = seen.emplace(record.comment.id, line_no);
  if (!inserted) {
    throw FormatError(line_no, "id",
                      "duplicate id '" + record.comment.id + "' (lines " + std::to_string(it->second) + " and " +
                          std::to_string(line_no) + ")");
  }
  corpus.records.push_back(std::move(record));
}

LabeledCorpus ingest_lines(std::string_view text, std::string provenance) {
  LabeledCorpus corpus;
  corpus.provenance = std::move(provenance);
  std::map<std::string, std::size_t> seen;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    ++line_no;
    std::string_view line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    start = end + 1;
    if (text::is_blank(line)) continue;
    add_unique(corpus, seen, parse_line_record(line, line_no), line_no);
  }
  return corpus;
}

LabeledCorpus ingest_csv(std::string_view text, std::string provenance) {
  LabeledCorpus corpus;
  corpus.provenance = std::move(provenance);
  const std::vector<CsvRow> rows = parse_csv(text);
  if (rows.empty()) throw FormatError(1, "", "missing header row");

  std::map<std::string, std::size_t> column;
  for (std::size_t i = 0; i < rows[0].fields.size(); ++i) {
    column.emplace(text::to_slug(rows[0].fields[i]), i);
  }
  for (const char* required : {"id", "body", "label"}) {
    if (!column.contains(required)) throw FormatError(rows[0].line, required, "required column missing from header");
  }
  auto cell = [&](const CsvRow& row, const std::string& name) -> std::optional<std::string> {
    auto it = column.find(name);
    if (it == column.end()) return std::nullopt;
    if (it->second >= row.fields.size()) throw FormatError(row.line, name, "row has too few fields");
    return row.fields[it->second];
  };

  std::map<std::string, std::size_t> seen;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const CsvRow& row = rows[r];
    if (row.fields.size() == 1 && text::is_blank(row.fields[0])) continue;
    if (row.fields.size() > rows[0].fields.size()) throw FormatError(row.line, "", "row has more fields than header");
    LabeledRecord rec;
    rec.comment.id = std::string(text::trim(*cell(row, "id")));
    rec.comment.body = *cell(row, "body");
    check_comment(rec.comment, row.line);
    rec.label = label_at(*cell(row, "label"), row.line);
    if (auto cats = cell(row, "categories"); cats && !text::is_blank(*cats)) rec.categories = split_categories(*cats);
    for (auto [name, field] : {std::pair{"source", &rec.comment.source}, std::pair{"author", &rec.comment.author},
                               std::pair{"created_at", &rec.comment.created_at},
                               std::pair{"context", &rec.comment.context}}) {
      if (auto value = cell(row, name); value && !value->empty()) *field = *value;
    }
    add_unique(corpus, seen, std::move(rec), row.line);
  }
  return corpus;
}

}  // namespace

std::size_t LabeledCorpus::count(Label label) const {
  std::size_t n = 0;
  for (const LabeledRecord& r : records) n += r.label == label ? 1 : 0;
  return n;
}

CorpusFormat parse_format(std::string_view name) {
  const std::string slug = text::to_slug(name);
  if (slug == "jsonl" || slug == "line_records" || slug == "lines") return CorpusFormat::kLineRecords;
  if (slug == "csv" || slug == "comma_separated") return CorpusFormat::kCsv;
  throw ConfigError("unknown corpus format '" + std::string(name) + "'");
}

CorpusFormat format_for_path(const std::string& path) {
  const std::size_t dot = path.rfind('.');
  if (dot != std::string::npos && text::to_lower_ascii(path.substr(dot)) == ".csv") return CorpusFormat::kCsv;
  return CorpusFormat::kLineRecords;
}

LabeledRecord parse_line_record(std::string_view line, std::size_t line_no) {
  const json j = parse_object(line, line_no);
  LabeledRecord rec;
  rec.comment = comment_from_object(j, line_no);
  rec.label = label_at(string_field(j, "label", line_no, true), line_no);
  if (auto it = j.find("categories"); it != j.end() && !it->is_null()) {
    if (!it->is_array()) throw FormatError(line_no, "categories", "expected an array of strings");
    std::set<std::string> cats;
    for (const json& c : *it) {
      if (!c.is_string()) throw FormatError(line_no, "categories", "expected an array of strings");
      cats.insert(text::to_slug(c.get<std::string>()));
    }
    rec.categories = std::move(cats);
  }
  return rec;
}

CommentRecord parse_comment_line(std::string_view line, std::size_t line_no) {
  return comment_from_object(parse_object(line, line_no), line_no);
}

json to_line_record(const LabeledRecord& record) {
  json j = record.comment;
  j["label"] = to_string(record.label);
  if (record.categories) j["categories"] = *record.categories;
  return j;
}

LabeledCorpus ingest_text(std::string_view text, CorpusFormat format, std::string provenance) {
  return format == CorpusFormat::kCsv ? ingest_csv(text, std::move(provenance))
                                      : ingest_lines(text, std::move(provenance));
}

LabeledCorpus ingest(const std::string& path, CorpusFormat format) {
  return ingest_text(read_file(path), format, path);
}

LabeledCorpus ingest(const std::string& path) { return ingest(path, format_for_path(path)); }

void validate_categories(const LabeledCorpus& corpus, const Taxonomy& taxonomy) {
  for (const LabeledRecord& r : corpus.records) {
    if (!r.categories) continue;
    for (const std::string& c : *r.categories) {
      if (!taxonomy.contains(c)) {
        throw ValidationError("record '" + r.comment.id + "' has category '" + c + "' outside taxonomy '" +
                              taxonomy.version() + "'");
      }
    }
  }
}

std::vector<CsvRow> parse_csv(std::string_view text) {
  std::vector<CsvRow> rows;
  if (text.starts_with("\xEF\xBB\xBF")) text.remove_prefix(3);
  std::size_t line = 1;
  std::size_t i = 0;
  while (i < text.size()) {
    CsvRow row;
    row.line = line;
    std::string field;
    bool row_done = false;
    while (!row_done) {
      if (i < text.size() && text[i] == '"') {
        ++i;
        for (;;) {
          if (i >= text.size()) throw FormatError(row.line, "", "unterminated quoted field");
          const char ch = text[i++];
          if (ch == '"') {
            if (i < text.size() && text[i] == '"') {
              field += '"';
              ++i;
            } else {
              break;
            }
          } else {
            if (ch == '\n') ++line;
            field += ch;
          }
        }
        if (i < text.size() && text[i] != ',' && text[i] != '\n' && text[i] != '\r') {
          throw FormatError(line, "", "unexpected character after closing quote");
        }
      } else {
        while (i < text.size() && text[i] != ',' && text[i] != '\n' && text[i] != '\r') field += text[i++];
      }
      row.fields.push_back(std::move(field));
      field.clear();
      if (i >= text.size()) {
        row_done = true;
      } else if (text[i] == ',') {
        ++i;
      } else {
        if (text[i] == '\r') ++i;
        if (i < text.size() && text[i] == '\n') ++i;
        ++line;
        row_done = true;
      }
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace revguard::corpus

#pragma once

#include "revguard/core/errors.h"
#include "revguard/core/taxonomy.h"
#include "revguard/core/types.h"

#include <json.hpp>

#include <optional>
#include <set>
#include <string>
#include <vector>

namespace revguard::corpus {

struct LabeledRecord {
  CommentRecord comment;
  Label label = Label::kNonToxic;
  std::optional<std::set<std::string>> categories;
};

struct LabeledCorpus {
  std::vector<LabeledRecord> records;
  std::string provenance;

  std::size_t count(Label label) const;
};

enum class CorpusFormat { kLineRecords, kCsv };

// "jsonl" / "line-records" or "csv" / "comma-separated".
CorpusFormat parse_format(std::string_view name);
// From the file extension: .csv is comma-separated, anything else line records.
CorpusFormat format_for_path(const std::string& path);

// A malformed input row. `line` is 1-based and counts the CSV header.
class FormatError : public ValidationError {
 public:
  FormatError(std::size_t line, std::string column, const std::string& message)
      : ValidationError("line " + std::to_string(line) + (column.empty() ? "" : ", column '" + column + "'") + ": " +
                        message),
        line_(line),
        column_(std::move(column)) {}
  std::size_t line() const { return line_; }
  const std::string& column() const { return column_; }

 private:
  std::size_t line_;
  std::string column_;
};

// Line-record format: one JSON object per line with id, body, label and
// optional categories[], source, author, created_at, context. Blank lines
// are skipped.
LabeledRecord parse_line_record(std::string_view line, std::size_t line_no);
// Same format without the label requirement, for unlabeled inputs.
CommentRecord parse_comment_line(std::string_view line, std::size_t line_no);
nlohmann::json to_line_record(const LabeledRecord& record);

// Reads and validates a whole corpus. Duplicate ids fail naming both lines;
// empty bodies fail at their line. CSV needs a header with id, body and
// label; categories are ';'-separated.
LabeledCorpus ingest_text(std::string_view text, CorpusFormat format, std::string provenance = {});
LabeledCorpus ingest(const std::string& path, CorpusFormat format);
LabeledCorpus ingest(const std::string& path);

// Every category in `corpus` must belong to `taxonomy` (the marker allowed).
void validate_categories(const LabeledCorpus& corpus, const Taxonomy& taxonomy);

// RFC 4180 reader: quoted fields may hold commas, newlines and "" escapes.
// Each row carries the line it started on.
struct CsvRow {
  std::size_t line = 0;
  std::vector<std::string> fields;
};
std::vector<CsvRow> parse_csv(std::string_view text);

}  // namespace revguard::corpus

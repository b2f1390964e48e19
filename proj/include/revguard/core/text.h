#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace revguard::text {

// NFC normalization plus CRLF/CR -> LF. Invalid UTF-8 sequences are replaced
// with U+FFFD. Idempotent.
std::string normalize(std::string_view input);

std::string_view trim(std::string_view s);
bool is_blank(std::string_view s);

std::string to_lower_ascii(std::string_view s);

// Lowercase slug: ASCII alphanumerics kept, every other run collapsed to a
// single '_', leading/trailing '_' removed. "Object-Directed Toxicity" ->
// "object_directed_toxicity".
std::string to_slug(std::string_view s);

// Lowercase hex SHA-256 digest.
std::string sha256_hex(std::string_view data);

// A code span found in comment text: either a fenced block (``` ... ```)
// or an inline `span`. `text` is the verbatim source including delimiters.
struct CodeSpan {
  std::size_t offset = 0;
  std::string text;
  bool fenced = false;
};

std::vector<CodeSpan> find_code_spans(std::string_view body);

// Replaces every code span with `placeholder`.
std::string replace_code_spans(std::string_view body, std::string_view placeholder);

std::string replace_all(std::string s, std::string_view from, std::string_view to);

}  // namespace revguard::text

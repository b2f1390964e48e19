#include "revguard/coach/xml_reader.h"

#include "revguard/core/text.h"

#include <cctype>
#include <charconv>
#include <cstdint>

namespace revguard::coach {

namespace {

void append_utf8(std::string& out, std::uint32_t cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

bool valid_xml_char(std::uint32_t cp) {
  return cp == 0x9 || cp == 0xA || cp == 0xD || (cp >= 0x20 && cp <= 0xD7FF) || (cp >= 0xE000 && cp <= 0xFFFD) ||
         (cp >= 0x10000 && cp <= 0x10FFFF);
}

// Recursive-descent reader over a fixed buffer. Every parse_* member either
// consumes a complete construct and returns true, or returns false with
// pos_ unspecified; callers restore pos_ themselves.
class Reader {
 public:
  explicit Reader(std::string_view s, std::size_t pos = 0) : s_(s), pos_(pos) {}

  std::size_t pos() const { return pos_; }
  bool at_end() const { return pos_ >= s_.size(); }
  const std::string& error() const { return error_; }

  bool fail(std::string message) {
    if (error_.empty()) error_ = std::move(message) + " at offset " + std::to_string(pos_);
    return false;
  }

  bool starts_with(std::string_view lit) const { return s_.substr(pos_, lit.size()) == lit; }

  bool consume(std::string_view lit) {
    if (!starts_with(lit)) return false;
    pos_ += lit.size();
    return true;
  }

  void skip_ws() {
    while (!at_end() && (s_[pos_] == ' ' || s_[pos_] == '\t' || s_[pos_] == '\n' || s_[pos_] == '\r')) ++pos_;
  }

  bool skip_comment() {
    if (!consume("<!--")) return false;
    const std::size_t end = s_.find("-->", pos_);
    if (end == std::string_view::npos) return fail("unterminated comment");
    pos_ = end + 3;
    return true;
  }

  // Whitespace and comments between markup.
  bool skip_misc() {
    for (;;) {
      skip_ws();
      if (starts_with("<!--")) {
        if (!skip_comment()) return false;
        continue;
      }
      return true;
    }
  }

  bool skip_xml_decl() {
    if (!starts_with("<?xml")) return true;
    const std::size_t end = s_.find("?>", pos_);
    if (end == std::string_view::npos) return fail("unterminated XML declaration");
    pos_ = end + 2;
    return true;
  }

  bool parse_name(std::string& out) {
    const std::size_t start = pos_;
    while (!at_end()) {
      const unsigned char c = static_cast<unsigned char>(s_[pos_]);
      if (std::isalnum(c) || c == '_' || c == '-' || c == ':' || c == '.') ++pos_;
      else break;
    }
    if (pos_ == start || std::isdigit(static_cast<unsigned char>(s_[start]))) return fail("expected a name");
    out.assign(s_.substr(start, pos_ - start));
    return true;
  }

  bool parse_attr_value(std::string& out) {
    if (at_end() || (s_[pos_] != '"' && s_[pos_] != '\'')) return fail("expected a quoted attribute value");
    const char quote = s_[pos_++];
    const std::size_t end = s_.find(quote, pos_);
    if (end == std::string_view::npos) return fail("unterminated attribute value");
    const std::string_view raw = s_.substr(pos_, end - pos_);
    if (raw.find('<') != std::string_view::npos) return fail("'<' inside attribute value");
    auto decoded = decode_entities(raw);
    if (!decoded) return fail("bad entity in attribute value");
    out = std::move(*decoded);
    pos_ = end + 1;
    return true;
  }

  // Character data up to the next tag; entities and CDATA decoded.
  bool parse_text(std::string& out) {
    while (!at_end()) {
      if (starts_with("<![CDATA[")) {
        pos_ += 9;
        const std::size_t end = s_.find("]]>", pos_);
        if (end == std::string_view::npos) return fail("unterminated CDATA section");
        out.append(s_.substr(pos_, end - pos_));
        pos_ = end + 3;
        continue;
      }
      if (starts_with("<!--")) {
        if (!skip_comment()) return false;
        continue;
      }
      if (s_[pos_] == '<') return true;
      if (s_[pos_] == '&') {
        const std::size_t semi = s_.find(';', pos_);
        if (semi == std::string_view::npos || semi - pos_ > 12) return fail("unterminated entity reference");
        auto decoded = decode_entities(s_.substr(pos_, semi + 1 - pos_));
        if (!decoded) return fail("unknown entity reference");
        out.append(*decoded);
        pos_ = semi + 1;
        continue;
      }
      out.push_back(s_[pos_++]);
    }
    return true;
  }

  bool parse_close(std::string_view name) {
    if (!consume("</")) return fail("expected closing tag </" + std::string(name) + ">");
    if (!consume(name)) return fail("mismatched closing tag, expected </" + std::string(name) + ">");
    skip_ws();
    if (!consume(">")) return fail("expected '>'");
    return true;
  }

  // <category name="...">text</category> or <category name="..."/>
  bool parse_category(RawCategory& out) {
    if (!consume("<category")) return fail("expected <category>");
    std::optional<std::string> name;
    for (;;) {
      const std::size_t before_ws = pos_;
      skip_ws();
      if (consume("/>")) {
        out.explanation.clear();
        break;
      }
      if (consume(">")) {
        std::string body;
        if (!parse_text(body)) return false;
        if (!parse_close("category")) return false;
        out.explanation = std::string(text::trim(body));
        break;
      }
      if (pos_ == before_ws) return fail("expected whitespace before attribute");
      std::string attr;
      if (!parse_name(attr)) return false;
      skip_ws();
      if (!consume("=")) return fail("expected '=' after attribute name");
      skip_ws();
      std::string value;
      if (!parse_attr_value(value)) return false;
      if (attr != "name") return fail("unexpected attribute '" + attr + "'");
      if (name) return fail("duplicate name attribute");
      name = std::move(value);
    }
    if (!name) return fail("category element without a name attribute");
    out.name = std::move(*name);
    return true;
  }

  bool parse_result(std::vector<RawCategory>& out) {
    if (!consume("<result")) return fail("expected root element <result>");
    skip_ws();
    if (consume("/>")) return true;
    if (!consume(">")) return fail("<result> takes no attributes");
    for (;;) {
      if (!skip_misc()) return false;
      if (starts_with("</")) return parse_close("result");
      if (starts_with("<category")) {
        RawCategory cat;
        if (!parse_category(cat)) return false;
        out.push_back(std::move(cat));
        continue;
      }
      if (at_end()) return fail("unterminated <result>");
      return fail("unexpected content inside <result>");
    }
  }

 private:
  std::string_view s_;
  std::size_t pos_;
  std::string error_;
};

}  // namespace

std::optional<std::string> decode_entities(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size();) {
    if (s[i] != '&') {
      out.push_back(s[i++]);
      continue;
    }
    const std::size_t semi = s.find(';', i);
    if (semi == std::string_view::npos) return std::nullopt;
    const std::string_view ref = s.substr(i + 1, semi - i - 1);
    if (ref == "lt") out.push_back('<');
    else if (ref == "gt") out.push_back('>');
    else if (ref == "amp") out.push_back('&');
    else if (ref == "quot") out.push_back('"');
    else if (ref == "apos") out.push_back('\'');
    else if (ref.size() >= 2 && ref[0] == '#') {
      const bool hex = ref[1] == 'x';
      const std::string_view digits = ref.substr(hex ? 2 : 1);
      if (digits.empty() || digits.size() > 8) return std::nullopt;
      std::uint32_t cp = 0;
      auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), cp, hex ? 16 : 10);
      if (ec != std::errc{} || ptr != digits.data() + digits.size() || !valid_xml_char(cp)) return std::nullopt;
      append_utf8(out, cp);
    } else {
      return std::nullopt;
    }
    i = semi + 1;
  }
  return out;
}

StrictParse parse_strict(std::string_view raw) {
  StrictParse result;
  Reader r(raw);
  // Optional byte-order mark.
  r.consume("\xEF\xBB\xBF");
  r.skip_ws();
  bool ok = r.skip_xml_decl() && r.skip_misc() && r.parse_result(result.categories) && r.skip_misc();
  if (ok && !r.at_end()) ok = r.fail("trailing content after </result>");
  result.ok = ok;
  if (!ok) {
    result.categories.clear();
    result.error = r.error().empty() ? "malformed document" : r.error();
  }
  return result;
}

std::vector<RawCategory> scan_lenient(std::string_view raw) {
  std::vector<RawCategory> found;
  std::size_t pos = 0;
  while ((pos = raw.find("<category", pos)) != std::string_view::npos) {
    const std::size_t after = pos + 9;
    if (after < raw.size() && (raw[after] == ' ' || raw[after] == '\t' || raw[after] == '\n' || raw[after] == '\r' ||
                               raw[after] == '/' || raw[after] == '>')) {
      Reader r(raw, pos);
      RawCategory cat;
      if (r.parse_category(cat)) {
        found.push_back(std::move(cat));
        pos = r.pos();
        continue;
      }
    }
    ++pos;
  }
  return found;
}

}  // namespace revguard::coach

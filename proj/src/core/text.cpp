#include "revguard/core/text.h"

#include "revguard/core/errors.h"

#include <openssl/evp.h>
#include <unicode/normalizer2.h>
#include <unicode/unistr.h>

#include <array>
#include <cctype>
#include <memory>

namespace revguard {

std::string_view to_string(BackendErrorKind kind) {
  switch (kind) {
    case BackendErrorKind::kTimeout: return "timeout";
    case BackendErrorKind::kTransport: return "transport";
    case BackendErrorKind::kHttpStatus: return "http_status";
    case BackendErrorKind::kRetryExhausted: return "retry_exhausted";
    case BackendErrorKind::kProtocol: return "protocol";
    case BackendErrorKind::kNotRegistered: return "not_registered";
  }
  return "unknown";
}

}  // namespace revguard

namespace revguard::text {

namespace {

std::string unify_newlines(std::string_view input) {
  std::string out;
  out.reserve(input.size());
  for (std::size_t i = 0; i < input.size(); ++i) {
    if (input[i] == '\r') {
      out.push_back('\n');
      if (i + 1 < input.size() && input[i + 1] == '\n') ++i;
    } else {
      out.push_back(input[i]);
    }
  }
  return out;
}

bool is_ascii(std::string_view s) {
  for (unsigned char c : s) {
    if (c >= 0x80) return false;
  }
  return true;
}

}  // namespace

std::string normalize(std::string_view input) {
  std::string unified = unify_newlines(input);
  if (is_ascii(unified)) return unified;  // ASCII is already NFC

  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2* nfc = icu::Normalizer2::getNFCInstance(status);
  if (U_FAILURE(status)) throw Error("ICU NFC normalizer unavailable");
  icu::UnicodeString source = icu::UnicodeString::fromUTF8(unified);
  icu::UnicodeString normalized = nfc->normalize(source, status);
  if (U_FAILURE(status)) throw Error("NFC normalization failed");
  std::string out;
  normalized.toUTF8String(out);
  return out;
}

std::string_view trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

bool is_blank(std::string_view s) { return trim(s).empty(); }

std::string to_lower_ascii(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::string to_slug(std::string_view s) {
  std::string out;
  bool pending_sep = false;
  for (unsigned char c : s) {
    if (std::isalnum(c)) {
      if (pending_sep && !out.empty()) out.push_back('_');
      pending_sep = false;
      out.push_back(static_cast<char>(std::tolower(c)));
    } else {
      pending_sep = true;
    }
  }
  return out;
}

std::string sha256_hex(std::string_view data) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest.data(), &len, EVP_sha256(), nullptr) != 1) {
    throw Error("SHA-256 digest failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(len * 2);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(kHex[digest[i] >> 4]);
    out.push_back(kHex[digest[i] & 0x0f]);
  }
  return out;
}

std::vector<CodeSpan> find_code_spans(std::string_view body) {
  std::vector<CodeSpan> spans;
  std::size_t i = 0;
  while (i < body.size()) {
    if (body.compare(i, 3, "```") == 0) {
      std::size_t close = body.find("```", i + 3);
      if (close == std::string_view::npos) {  // unterminated fence: not code
        i += 3;
        continue;
      }
      std::size_t end = close + 3;
      spans.push_back({i, std::string(body.substr(i, end - i)), true});
      i = end;
      continue;
    }
    if (body[i] == '`') {
      std::size_t close = body.find('`', i + 1);
      std::size_t newline = body.find('\n', i + 1);
      if (close != std::string_view::npos && close > i + 1 &&
          (newline == std::string_view::npos || close < newline)) {
        spans.push_back({i, std::string(body.substr(i, close + 1 - i)), false});
        i = close + 1;
        continue;
      }
    }
    ++i;
  }
  return spans;
}

std::string replace_code_spans(std::string_view body, std::string_view placeholder) {
  std::string out;
  std::size_t pos = 0;
  for (const CodeSpan& span : find_code_spans(body)) {
    out.append(body.substr(pos, span.offset - pos));
    out.append(placeholder);
    pos = span.offset + span.text.size();
  }
  out.append(body.substr(pos));
  return out;
}

std::string replace_all(std::string s, std::string_view from, std::string_view to) {
  if (from.empty()) return s;
  std::size_t pos = 0;
  while ((pos = s.find(from, pos)) != std::string::npos) {
    s.replace(pos, from.size(), to);
    pos += to.size();
  }
  return s;
}

}  // namespace revguard::text

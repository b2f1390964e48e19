#include "revguard/coach/prompt_template.h"

#include "revguard/core/errors.h"
#include "revguard/core/text.h"

#include <filesystem>
#include <fstream>
#include <sstream>

namespace revguard::coach {

namespace {

constexpr std::string_view kBuiltinTemplate =
#include "builtin_coach_template.inc"
    ;

constexpr std::string_view kRequiredPlaceholders[] = {"{{persona}}", "{{definitions}}", "{{schema}}", "{{comment}}"};

std::string strip_trailing_newlines(std::string s) {
  while (!s.empty() && (s.back() == '\n' || s.back() == '\r')) s.pop_back();
  return s;
}

}  // namespace

std::string_view heading(ProtocolElement element) {
  switch (element) {
    case ProtocolElement::kRole: return "### Role";
    case ProtocolElement::kTask: return "### Task";
    case ProtocolElement::kCategories: return "### Categories";
    case ProtocolElement::kGuidelines: return "### Guidelines";
    case ProtocolElement::kOutputFormat: return "### Output format";
  }
  return "";
}

PromptTemplate PromptTemplate::parse(std::string_view content, std::string default_version) {
  const std::string normalized = text::normalize(content);
  PromptTemplate t;
  t.version_ = std::move(default_version);
  enum class Section { kNone, kSystem, kUser } section = Section::kNone;
  bool saw_system = false, saw_user = false;
  std::istringstream in(normalized);
  for (std::string line; std::getline(in, line);) {
    if (line.rfind("@@version", 0) == 0) {
      t.version_ = std::string(text::trim(std::string_view(line).substr(9)));
      continue;
    }
    if (text::trim(line) == "@@system") {
      section = Section::kSystem;
      saw_system = true;
      continue;
    }
    if (text::trim(line) == "@@user") {
      section = Section::kUser;
      saw_user = true;
      continue;
    }
    if (section == Section::kSystem) t.system_ += line + "\n";
    else if (section == Section::kUser) t.user_ += line + "\n";
    else if (!text::is_blank(line)) throw ConfigError("prompt template text before @@system/@@user marker");
  }
  if (!saw_system || !saw_user) throw ConfigError("prompt template needs both @@system and @@user sections");
  t.system_ = strip_trailing_newlines(std::move(t.system_));
  t.user_ = strip_trailing_newlines(std::move(t.user_));
  if (t.version_.empty()) throw ConfigError("prompt template version is empty");

  const std::string whole = t.system_ + "\n" + t.user_;
  for (ProtocolElement element : kProtocolElements) {
    if (whole.find(heading(element)) == std::string::npos) {
      throw ConfigError("prompt template '" + t.version_ + "' lacks section '" + std::string(heading(element)) + "'");
    }
  }
  for (std::string_view placeholder : kRequiredPlaceholders) {
    if (whole.find(placeholder) == std::string::npos) {
      throw ConfigError("prompt template '" + t.version_ + "' lacks placeholder " + std::string(placeholder));
    }
  }
  return t;
}

PromptTemplate PromptTemplate::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open prompt template '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str(), std::filesystem::path(path).stem().string());
}

const PromptTemplate& PromptTemplate::builtin() {
  static const PromptTemplate t = parse(kBuiltinTemplate, "builtin");
  return t;
}

std::string render(std::string_view tmpl, const std::map<std::string, std::string, std::less<>>& values) {
  std::string out;
  out.reserve(tmpl.size());
  std::size_t pos = 0;
  while (pos < tmpl.size()) {
    const std::size_t open = tmpl.find("{{", pos);
    if (open == std::string_view::npos) break;
    const std::size_t close = tmpl.find("}}", open + 2);
    if (close == std::string_view::npos) break;
    const std::string_view name = tmpl.substr(open + 2, close - open - 2);
    out.append(tmpl.substr(pos, open - pos));
    if (auto it = values.find(name); it != values.end()) {
      out.append(it->second);
      pos = close + 2;
    } else {
      out.push_back('{');
      pos = open + 1;
    }
  }
  out.append(tmpl.substr(pos));
  return out;
}

}  // namespace revguard::coach

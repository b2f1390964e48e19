#pragma once

#include <array>
#include <map>
#include <string>
#include <string_view>

namespace revguard::coach {

// The five sections every coach prompt carries, in order.
enum class ProtocolElement { kRole, kTask, kCategories, kGuidelines, kOutputFormat };

inline constexpr std::array<ProtocolElement, 5> kProtocolElements = {
    ProtocolElement::kRole, ProtocolElement::kTask, ProtocolElement::kCategories, ProtocolElement::kGuidelines,
    ProtocolElement::kOutputFormat};

// Heading text that marks the section in a template ("### Role", ...).
std::string_view heading(ProtocolElement element);

// A versioned prompt template. File layout:
//
//   @@version <name>            (optional; defaults to the file stem)
//   @@system
//   ...system message text...
//   @@user
//   ...user message text...
//
// The template must contain the five section headings ("### Role",
// "### Task", "### Categories", "### Guidelines", "### Output format")
// across the two messages, and the placeholders {{persona}},
// {{definitions}}, {{schema}} and {{comment}}.
class PromptTemplate {
 public:
  static PromptTemplate parse(std::string_view content, std::string default_version = "custom");
  static PromptTemplate load_file(const std::string& path);

  // The template used when no file is configured (refinement stage 5).
  static const PromptTemplate& builtin();

  const std::string& version() const { return version_; }
  const std::string& system_text() const { return system_; }
  const std::string& user_text() const { return user_; }

 private:
  std::string version_;
  std::string system_;
  std::string user_;
};

// Replaces each {{name}} with values.at(name) in a single left-to-right pass;
// substituted text is never rescanned. Unknown placeholders are left as-is.
std::string render(std::string_view tmpl, const std::map<std::string, std::string, std::less<>>& values);

}  // namespace revguard::coach

#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace revguard::coach {

// A <category name="...">explanation</category> element as written by the
// model, before taxonomy checks. The explanation is entity-decoded and
// trimmed.
struct RawCategory {
  std::string name;
  std::string explanation;

  bool operator==(const RawCategory&) const = default;
};

struct StrictParse {
  bool ok = false;
  std::vector<RawCategory> categories;
  std::string error;  // set when !ok
};

// Accepts exactly one document of the form
//   [<?xml ...?>] <result> (<category name="...">text</category>)* </result>
// with optional whitespace and comments between elements. Category text may
// hold character/entity references and CDATA but no child elements; the
// only attribute allowed is `name`. Anything else is a failure.
StrictParse parse_strict(std::string_view raw);

// Finds every well-formed <category name="...">...</category> element
// anywhere in `raw`, skipping malformed fragments and surrounding prose.
std::vector<RawCategory> scan_lenient(std::string_view raw);

// Decodes &lt; &gt; &amp; &quot; &apos; &#N; &#xN;. Returns nullopt on an
// unknown or malformed reference.
std::optional<std::string> decode_entities(std::string_view s);

}  // namespace revguard::coach

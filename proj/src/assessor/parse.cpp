#include "pvrag/assessor/parse.hpp"

#include <json.hpp>
#include <optional>
#include <string>

#include "pvrag/core/text.hpp"

namespace pvrag::assessor {

namespace {

using nlohmann::json;

// End of the balanced {...} starting at `open`, skipping braces inside strings.
std::optional<std::size_t> matching_brace(std::string_view s, std::size_t open) {
  int depth = 0;
  bool in_string = false;
  bool escaped = false;
  for (std::size_t i = open; i < s.size(); ++i) {
    const char c = s[i];
    if (in_string) {
      if (escaped) {
        escaped = false;
      } else if (c == '\\') {
        escaped = true;
      } else if (c == '"') {
        in_string = false;
      }
      continue;
    }
    if (c == '"') {
      in_string = true;
    } else if (c == '{') {
      ++depth;
    } else if (c == '}') {
      if (--depth == 0) return i;
    }
  }
  return std::nullopt;
}

const json* find_key(const json& obj, std::string_view key) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (text::to_lower(it.key()) == key) return &it.value();
  }
  return nullptr;
}

bool has_descriptor_keys(const json& obj) {
  if (!obj.is_object()) return false;
  for (auto key : {"presence", "quantity", "location", "explanation"}) {
    if (find_key(obj, key) == nullptr) return false;
  }
  return true;
}

std::string token_of(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  return v.dump();
}

PVDescriptor to_descriptor(const json& obj) {
  PVDescriptor d;
  const json& presence = *find_key(obj, "presence");
  d.presence = presence.is_boolean() ? presence.get<bool>() : parse_presence(token_of(presence));
  d.quantity = parse_quantity(token_of(*find_key(obj, "quantity")));
  d.location = parse_location(token_of(*find_key(obj, "location")));
  const json& explanation = *find_key(obj, "explanation");
  if (!explanation.is_string()) throw ParseError("explanation must be a string");
  d.explanation = explanation.get<std::string>();
  require_valid(d, /*require_explanation=*/true);
  return d;
}

}  // namespace

PVDescriptor parse_structured_output(std::string_view raw) {
  std::size_t pos = 0;
  while ((pos = raw.find('{', pos)) != std::string_view::npos) {
    if (auto close = matching_brace(raw, pos)) {
      const json obj = json::parse(raw.substr(pos, *close - pos + 1), nullptr,
                                   /*allow_exceptions=*/false);
      if (!obj.is_discarded() && has_descriptor_keys(obj)) return to_descriptor(obj);
    }
    ++pos;
  }
  throw ParseError("no structured descriptor object found in model output");
}

}  // namespace pvrag::assessor

#include "pvrag/core/descriptor.hpp"

#include <algorithm>

#include "pvrag/core/errors.hpp"
#include "pvrag/core/text.hpp"

namespace pvrag {

namespace {

constexpr std::array<std::pair<QuantityInterval, std::string_view>, 5> kQuantityText = {{
    {QuantityInterval::ZeroToOne, "(0,1]"},
    {QuantityInterval::OneToFive, "(1,5]"},
    {QuantityInterval::FiveToTen, "(5,10]"},
    {QuantityInterval::TenPlus, "(10,inf)"},
    {QuantityInterval::NA, "NA"},
}};

constexpr std::array<std::pair<LocationLabel, std::string_view>, 10> kLocationText = {{
    {LocationLabel::Top, "top"},
    {LocationLabel::Bottom, "bottom"},
    {LocationLabel::Left, "left"},
    {LocationLabel::Right, "right"},
    {LocationLabel::Center, "center"},
    {LocationLabel::TopLeft, "top-left"},
    {LocationLabel::TopRight, "top-right"},
    {LocationLabel::BottomLeft, "bottom-left"},
    {LocationLabel::BottomRight, "bottom-right"},
    {LocationLabel::NA, "NA"},
}};

int order_of(QuantityInterval q) {
  if (q == QuantityInterval::NA) throw Error("no representative count for NA");
  return static_cast<int>(q);
}

}  // namespace

PVDescriptor negative_descriptor(std::string explanation) {
  return PVDescriptor{false, QuantityInterval::NA, LocationLabel::NA, std::move(explanation)};
}

std::optional<std::string> validate_descriptor(const PVDescriptor& d, bool require_explanation) {
  if (d.presence) {
    if (d.quantity == QuantityInterval::NA) return "quantity must be non-NA when present";
    if (d.location == LocationLabel::NA) return "location must be non-NA when present";
  } else {
    if (d.quantity != QuantityInterval::NA) return "quantity must be NA when absent";
    if (d.location != LocationLabel::NA) return "location must be NA when absent";
  }
  if (require_explanation && text::trim(d.explanation).empty()) {
    return "explanation must be non-empty";
  }
  return std::nullopt;
}

void require_valid(const PVDescriptor& d, bool require_explanation) {
  if (auto violation = validate_descriptor(d, require_explanation)) {
    throw ConsistencyError(*violation);
  }
}

double representative_count(QuantityInterval q) {
  static constexpr std::array<double, 4> kCounts = {0.5, 3.0, 7.0, 12.0};
  return kCounts[static_cast<std::size_t>(order_of(q))];
}

double site_capacity_kw(QuantityInterval q, double per_panel_kw) {
  if (!(per_panel_kw > 0.0)) throw Error("per-panel rating must be positive");
  return representative_count(q) * per_panel_kw;
}

std::pair<std::optional<QuantityInterval>, std::optional<QuantityInterval>> neighbor_intervals(
    QuantityInterval q) {
  const int i = order_of(q);
  std::optional<QuantityInterval> lower;
  std::optional<QuantityInterval> upper;
  if (i > 0) lower = kOrderedIntervals[static_cast<std::size_t>(i - 1)];
  if (i + 1 < static_cast<int>(kOrderedIntervals.size())) {
    upper = kOrderedIntervals[static_cast<std::size_t>(i + 1)];
  }
  return {lower, upper};
}

std::string_view to_string(QuantityInterval q) {
  return kQuantityText[static_cast<std::size_t>(q)].second;
}

std::string_view to_string(LocationLabel l) {
  return kLocationText[static_cast<std::size_t>(l)].second;
}

std::string_view presence_to_string(bool presence) { return presence ? "true" : "false"; }

QuantityInterval parse_quantity(std::string_view raw) {
  std::string token = text::to_lower(text::trim(raw));
  token.erase(std::remove(token.begin(), token.end(), ' '), token.end());
  for (const auto& [value, name] : kQuantityText) {
    if (token == text::to_lower(name)) return value;
  }
  throw VocabularyError(std::string(raw));
}

LocationLabel parse_location(std::string_view raw) {
  const std::string token = text::to_lower(text::trim(raw));
  for (const auto& [value, name] : kLocationText) {
    if (token == text::to_lower(name)) return value;
  }
  throw VocabularyError(std::string(raw));
}

bool parse_presence(std::string_view raw) {
  const std::string token = text::to_lower(text::trim(raw));
  if (token == "true") return true;
  if (token == "false") return false;
  throw VocabularyError(std::string(raw));
}

}  // namespace pvrag

#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <utility>

namespace pvrag {

/// Panel-count bin. The four non-NA values are ordered.
enum class QuantityInterval { ZeroToOne, OneToFive, FiveToTen, TenPlus, NA };

/// Coarse position of the array within the rooftop image (nine-region grid).
enum class LocationLabel {
  Top,
  Bottom,
  Left,
  Right,
  Center,
  TopLeft,
  TopRight,
  BottomLeft,
  BottomRight,
  NA
};

inline constexpr std::array<QuantityInterval, 4> kOrderedIntervals = {
    QuantityInterval::ZeroToOne, QuantityInterval::OneToFive, QuantityInterval::FiveToTen,
    QuantityInterval::TenPlus};

inline constexpr std::array<LocationLabel, 9> kLocations = {
    LocationLabel::Top,        LocationLabel::Bottom,   LocationLabel::Left,
    LocationLabel::Right,      LocationLabel::Center,   LocationLabel::TopLeft,
    LocationLabel::TopRight,   LocationLabel::BottomLeft, LocationLabel::BottomRight};

/// Structured rooftop PV description: presence, panel-count bin, location, free text.
struct PVDescriptor {
  bool presence = false;
  QuantityInterval quantity = QuantityInterval::NA;
  LocationLabel location = LocationLabel::NA;
  std::string explanation;

  friend bool operator==(const PVDescriptor&, const PVDescriptor&) = default;
};

/// The canonical "no PV" descriptor.
PVDescriptor negative_descriptor(std::string explanation = {});

/// Returns std::nullopt when the descriptor is consistent, otherwise the name of
/// the first violated rule. `require_explanation` enforces a non-empty explanation
/// (backend-produced descriptors).
std::optional<std::string> validate_descriptor(const PVDescriptor& d,
                                               bool require_explanation = false);

/// Throws ConsistencyError when validate_descriptor reports a violation.
void require_valid(const PVDescriptor& d, bool require_explanation = false);

/// Representative panel count of a bin: 0.5, 3, 7, 12. Throws for NA.
double representative_count(QuantityInterval q);

/// Installed capacity in kW of a site whose panel count falls in `q`.
double site_capacity_kw(QuantityInterval q, double per_panel_kw);

/// Adjacent bins in the total order; std::nullopt at the ends. Throws for NA.
std::pair<std::optional<QuantityInterval>, std::optional<QuantityInterval>> neighbor_intervals(
    QuantityInterval q);

// Canonical text forms. Parsing is case-insensitive and trims whitespace;
// unknown tokens raise VocabularyError.
std::string_view to_string(QuantityInterval q);
std::string_view to_string(LocationLabel l);
std::string_view presence_to_string(bool presence);
QuantityInterval parse_quantity(std::string_view text);
LocationLabel parse_location(std::string_view text);
bool parse_presence(std::string_view text);

}  // namespace pvrag

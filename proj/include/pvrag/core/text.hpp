#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace pvrag::text {

std::string_view trim(std::string_view s);
std::string to_lower(std::string_view s);
std::vector<std::string> split(std::string_view s, char delim);

/// Quotes a CSV field when it contains a delimiter, quote, or line break.
std::string csv_field(std::string_view s);

/// Splits one CSV line honouring double-quoted fields.
std::vector<std::string> parse_csv_line(std::string_view line);

/// printf-style fixed-point rendering, e.g. fixed(0.5, 4) == "0.5000".
std::string fixed(double value, int decimals);

}  // namespace pvrag::text

#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace treesvm {

/// Shortest decimal text that parses back to the same double.
std::string format_double(double v);

/// Whole-token parse; nullopt on junk or trailing characters.
std::optional<double> parse_double(std::string_view tok);
std::optional<long long> parse_int(std::string_view tok);

}  // namespace treesvm

#pragma once

// Locale-independent number <-> text conversion.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace accproj {

/// Shortest representation that reads back to the same double.
std::string format_double(double value);

/// Whole-string parse; accepts a leading '+', "inf", "nan". No locale.
std::optional<double> parse_double(std::string_view text);
std::optional<std::uint64_t> parse_uint(std::string_view text);

std::string_view trim(std::string_view text);

}  // namespace accproj

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace bibo {

// Shortest decimal string that round-trips the exact double value. Used for
// every float we persist, so identical runs produce identical bytes.
std::string format_double(double value);

std::string format_int(std::int64_t value);

std::vector<std::string_view> split_fields(std::string_view line, char sep = ',');

// Returns nullopt on any trailing garbage or empty input.
std::optional<double> parse_double(std::string_view text);
std::optional<std::int64_t> parse_int(std::string_view text);

std::string join(const std::vector<std::string>& parts, char sep = ',');

}  // namespace bibo

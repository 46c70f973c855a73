#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace wtail {

// Shortest decimal text that parses back to exactly `value`.
std::string format_double(double value);

// Full-string decimal parse; nullopt on trailing garbage or empty input.
std::optional<double> parse_double(std::string_view text) noexcept;

}  // namespace wtail

#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace scalenet {

/// Shortest decimal form that parses back to the same double.
std::string format_real(double value);
double parse_real(std::string_view text);
long long parse_int(std::string_view text);

std::vector<std::string_view> split(std::string_view text, char sep);

/// Value of `key=` among whitespace-separated tokens, if present.
std::optional<std::string_view> find_field(std::string_view line, std::string_view key);
std::string_view require_field(std::string_view line, std::string_view key);

}  // namespace scalenet

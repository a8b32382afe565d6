#include "scalenet/text.hpp"

#include <charconv>
#include <cmath>

#include "scalenet/errors.hpp"

namespace scalenet {

std::string format_real(double value) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc()) throw InputError("cannot format number");
  return std::string(buf, end);
}

double parse_real(std::string_view text) {
  double value = 0.0;
  auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || end != text.data() + text.size()) {
    throw InputError("invalid number '" + std::string(text) + "'");
  }
  return value;
}

long long parse_int(std::string_view text) {
  long long value = 0;
  auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || end != text.data() + text.size()) {
    throw InputError("invalid integer '" + std::string(text) + "'");
  }
  return value;
}

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    std::size_t pos = text.find(sep, start);
    if (pos == std::string_view::npos) {
      parts.push_back(text.substr(start));
      return parts;
    }
    parts.push_back(text.substr(start, pos - start));
    start = pos + 1;
  }
}

std::optional<std::string_view> find_field(std::string_view line, std::string_view key) {
  for (std::string_view token : split(line, ' ')) {
    if (token.size() > key.size() && token.substr(0, key.size()) == key &&
        token[key.size()] == '=') {
      return token.substr(key.size() + 1);
    }
  }
  return std::nullopt;
}

std::string_view require_field(std::string_view line, std::string_view key) {
  auto value = find_field(line, key);
  if (!value) throw InputError("missing field '" + std::string(key) + "' in: " + std::string(line));
  return *value;
}

}  // namespace scalenet

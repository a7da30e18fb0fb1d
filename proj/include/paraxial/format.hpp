#pragma once

#include <charconv>
#include <cmath>
#include <string>
#include <system_error>

namespace paraxial {

/// Shortest-safe, locale-independent rendering with 17 significant digits
/// (round-trip exact for IEEE doubles).
inline std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buffer[32];
  auto result = std::to_chars(buffer, buffer + sizeof buffer, value,
                              std::chars_format::general, 17);
  return std::string(buffer, result.ptr);
}

/// Inverse of format_double; accepts "inf", "-inf" and "nan".
inline bool parse_double(std::string_view text, double& out) {
  if (text == "inf" || text == "+inf") {
    out = INFINITY;
    return true;
  }
  if (text == "-inf") {
    out = -INFINITY;
    return true;
  }
  if (text == "nan") {
    out = NAN;
    return true;
  }
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  auto result = std::from_chars(text.data(), text.data() + text.size(), out);
  return result.ec == std::errc{} && result.ptr == text.data() + text.size();
}

}  // namespace paraxial

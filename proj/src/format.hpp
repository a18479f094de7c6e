#pragma once

#include <charconv>
#include <string>

namespace phasekit::detail {

// Locale-independent decimal rendering with 15 significant digits.
inline std::string format_number(double v) {
  char buf[40];
  const auto result =
      std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 15);
  return std::string(buf, result.ptr);
}

}  // namespace phasekit::detail

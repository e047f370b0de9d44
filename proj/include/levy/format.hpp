#pragma once

#include <charconv>
#include <cmath>
#include <string>

namespace levy {

/// Shortest decimal form that round-trips to the same double; NaN prints empty.
inline std::string format_double(double v) {
  if (std::isnan(v)) return {};
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ec == std::errc{} ? end : buf);
}

}  // namespace levy

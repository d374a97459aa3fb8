#pragma once

#include <charconv>
#include <cmath>
#include <string>

namespace gaitforge::detail {

/// Shortest round-trip decimal form.
inline std::string fmt(double v)
{
  if (std::isnan(v)) {
    return "nan";
  }
  if (v == 0.0) {
    return "0";
  }
  char buf[64];
  auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

/// Fixed number of significant digits, for plot coordinates.
inline std::string fmt(double v, int digits)
{
  char buf[64];
  auto r = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, digits);
  return std::string(buf, r.ptr);
}

}  // namespace gaitforge::detail

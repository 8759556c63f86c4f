#pragma once

#include <charconv>
#include <stdexcept>
#include <string>

namespace stlsynth {

/// Shortest decimal form that round-trips the exact double. Normalizes -0.
inline std::string format_double(double v) {
  if (v == 0.0) return "0";
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc()) throw std::runtime_error("format_double failed");
  return std::string(buf, ptr);
}

}  // namespace stlsynth

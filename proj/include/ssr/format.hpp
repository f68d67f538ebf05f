#pragma once

#include <charconv>
#include <cstdio>
#include <string>

namespace ssr {

/// Shortest decimal string that round-trips the double exactly.
inline std::string to_shortest(double value) {
  char buffer[32];
  const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, ptr);
}

/// Fixed significant-digit rendering for human-readable output.
inline std::string to_sig(double value, int digits = 6) {
  char buffer[48];
  std::snprintf(buffer, sizeof(buffer), "%.*g", digits, value);
  return std::string(buffer);
}

}  // namespace ssr

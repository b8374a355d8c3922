#pragma once

#include <array>
#include <charconv>
#include <string>

namespace smre::detail {

/// Shortest round-trip decimal form of v.
inline std::string format_double(double v) {
  std::array<char, 32> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), ptr);
}

}  // namespace smre::detail

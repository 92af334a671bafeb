#pragma once

#include <array>
#include <charconv>
#include <string>

namespace pxg {

/// Shortest round-trip decimal form of v. Integral values keep a trailing
/// ".0" so they read back as floating point.
inline std::string format_double(double v) {
  std::array<char, 32> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  std::string out(buf.data(), res.ptr);
  if (out.find_first_of(".eninf") == std::string::npos) out += ".0";
  return out;
}

}  // namespace pxg

#pragma once

#include <charconv>
#include <cmath>
#include <ostream>
#include <string>
#include <string_view>

namespace rfim::csv {

inline constexpr std::string_view kSchemaLine = "# schema=1";

/// Shortest round-trip representation; identical bytes for identical values.
inline std::string number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

inline std::string_view boolean(bool b) { return b ? "true" : "false"; }

inline void header(std::ostream& out, std::string_view columns) {
  out << kSchemaLine << '\n' << columns << '\n';
}

}  // namespace rfim::csv

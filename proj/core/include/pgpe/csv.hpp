#pragma once

#include <charconv>
#include <string>
#include <system_error>

namespace pgpe::csv {

/// Decimal rendering with 17 significant digits (printf "%.17g"), which
/// round-trips every finite double. Non-finite values render as nan/inf/-inf.
[[nodiscard]] inline std::string num(double value) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::general, 17);
  if (res.ec != std::errc{}) return "nan";
  return {buf, res.ptr};
}

}  // namespace pgpe::csv

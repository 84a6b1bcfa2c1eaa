#pragma once

#include <cstdio>
#include <string>

namespace fbal {

/// Deterministic real formatting: 17 significant digits, lowercase exponent,
/// negative zero printed as "0".
inline std::string format_real(double v) {
  if (v == 0.0) return "0";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace fbal

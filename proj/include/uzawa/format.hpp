#pragma once

#include <cstdio>
#include <string>

namespace uzawa {

/// Round-trippable decimal form of a double (17 significant digits).
inline std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace uzawa

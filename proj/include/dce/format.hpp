#pragma once

#include <cstdio>
#include <cstdlib>
#include <string>

namespace dce {

// stamped into every serialized artifact (click records, CSV/JSON outputs)
inline constexpr const char* kArtifactVersion = "0.1.0";

// shortest decimal that parses back to the same double (tries 15..17 digits)
inline std::string format_double(double v) {
  char buf[40];
  for (int prec = 15; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

// compact form for diagnostics and messages
inline std::string format_short(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

}  // namespace dce

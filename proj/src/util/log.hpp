#pragma once

#include <cstdio>
#include <string>

namespace exknet {

// Warnings go to stderr; outputs stay machine-parsable on stdout.
inline void log_warn(const std::string& msg) {
  std::fprintf(stderr, "warning: %s\n", msg.c_str());
}

inline void log_info(const std::string& msg) {
  std::fprintf(stderr, "info: %s\n", msg.c_str());
}

}  // namespace exknet

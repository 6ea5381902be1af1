#include "cat0/log.hpp"

#include <cstdio>
#include <cstdlib>
#include <cstring>

namespace cat0 {

LogLevel log_level() {
  static const LogLevel level = [] {
    const char* env = std::getenv("CAT0_LOG");
    if (env == nullptr) return LogLevel::off;
    if (std::strcmp(env, "debug") == 0) return LogLevel::debug;
    if (std::strcmp(env, "info") == 0) return LogLevel::info;
    return LogLevel::off;
  }();
  return level;
}

bool log_enabled(LogLevel level) {
  return static_cast<int>(level) <= static_cast<int>(log_level());
}

void log_line(LogLevel level, const std::string& msg) {
  if (!log_enabled(level)) return;
  std::fprintf(stderr, "[cat0] %s\n", msg.c_str());
}

}  // namespace cat0

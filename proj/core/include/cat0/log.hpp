#pragma once

#include <string>

namespace cat0 {

enum class LogLevel { off = 0, info = 1, debug = 2 };

// Level comes from the CAT0_LOG environment variable ("info" or "debug",
// anything else means off) and is read once per process.
LogLevel log_level();

bool log_enabled(LogLevel level);

// Writes "[cat0] msg" to stderr when the level is enabled.
void log_line(LogLevel level, const std::string& msg);

}  // namespace cat0

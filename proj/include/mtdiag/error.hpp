#pragma once

#include <cstdlib>
#include <iostream>
#include <stdexcept>
#include <string>
#include <vector>

namespace mtdiag {

/// Toolkit-wide error type. Carries a human-readable message and, for
/// file loaders, an optional list of per-record problems.
class Error : public std::runtime_error {
 public:
  explicit Error(std::string message) : std::runtime_error(std::move(message)) {}

  Error(std::string message, std::vector<std::string> details)
      : std::runtime_error(join(message, details)), details_(std::move(details)) {}

  const std::vector<std::string>& details() const { return details_; }

 private:
  static std::string join(const std::string& message, const std::vector<std::string>& details) {
    std::string out = message;
    for (const auto& d : details) {
      out += "\n  - " + d;
    }
    return out;
  }

  std::vector<std::string> details_;
};

enum class LogLevel { quiet = 0, info = 1, debug = 2 };

// Controlled by the MTDIAG_LOG_LEVEL environment variable (quiet|info|debug).
inline LogLevel log_level() {
  static LogLevel level = [] {
    const char* env = std::getenv("MTDIAG_LOG_LEVEL");
    if (env == nullptr) return LogLevel::info;
    std::string v(env);
    if (v == "quiet") return LogLevel::quiet;
    if (v == "debug") return LogLevel::debug;
    return LogLevel::info;
  }();
  return level;
}

inline void log_warn(const std::string& message) {
  if (log_level() >= LogLevel::info) std::cerr << "[mtdiag] warning: " << message << "\n";
}

inline void log_debug(const std::string& message) {
  if (log_level() >= LogLevel::debug) std::cerr << "[mtdiag] " << message << "\n";
}

}  // namespace mtdiag

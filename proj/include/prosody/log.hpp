// Minimal leveled logging to stderr. Level comes from the PROSODY_LOG
// environment variable: error | warn | info | debug (default: warn).
#pragma once

#include <cstdio>
#include <cstdlib>
#include <mutex>
#include <string>

namespace prosody {

enum class LogLevel { Error = 0, Warn = 1, Info = 2, Debug = 3 };

namespace detail {

inline LogLevel parse_log_env() {
    const char* env = std::getenv("PROSODY_LOG");
    if (!env) return LogLevel::Warn;
    std::string v(env);
    if (v == "error") return LogLevel::Error;
    if (v == "warn") return LogLevel::Warn;
    if (v == "info") return LogLevel::Info;
    if (v == "debug") return LogLevel::Debug;
    return LogLevel::Warn;
}

inline std::mutex& log_mutex() {
    static std::mutex m;
    return m;
}

}  // namespace detail

inline LogLevel& log_level() {
    static LogLevel level = detail::parse_log_env();
    return level;
}

inline void log_msg(LogLevel level, const std::string& msg) {
    if (level > log_level()) return;
    static const char* names[] = {"error", "warn", "info", "debug"};
    std::lock_guard<std::mutex> lock(detail::log_mutex());
    std::fprintf(stderr, "[%s] %s\n", names[static_cast<int>(level)], msg.c_str());
}

inline void log_error(const std::string& msg) { log_msg(LogLevel::Error, msg); }
inline void log_warn(const std::string& msg) { log_msg(LogLevel::Warn, msg); }
inline void log_info(const std::string& msg) { log_msg(LogLevel::Info, msg); }
inline void log_debug(const std::string& msg) { log_msg(LogLevel::Debug, msg); }

}  // namespace prosody

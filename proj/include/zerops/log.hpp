#pragma once

#include <cstdarg>
#include <cstdio>
#include <ctime>
#include <mutex>

namespace zerops::log {

enum class Level { debug = 0, info = 1, warn = 2, error = 3 };

inline Level& min_level() {
    static Level level = Level::info;
    return level;
}

inline std::mutex& sink_mutex() {
    static std::mutex m;
    return m;
}

inline void vlog(Level level, const char* fmt, va_list args) {
    if (level < min_level()) return;
    static const char* names[] = {"DEBUG", "INFO", "WARN", "ERROR"};
    std::timespec ts{};
    std::timespec_get(&ts, TIME_UTC);
    std::tm tm{};
    gmtime_r(&ts.tv_sec, &tm);
    std::lock_guard lock(sink_mutex());
    std::fprintf(stderr, "%04d-%02d-%02dT%02d:%02d:%02dZ %-5s ", tm.tm_year + 1900,
                 tm.tm_mon + 1, tm.tm_mday, tm.tm_hour, tm.tm_min, tm.tm_sec,
                 names[static_cast<int>(level)]);
    std::vfprintf(stderr, fmt, args);
    std::fputc('\n', stderr);
}

#if defined(__GNUC__)
#define ZEROPS_PRINTF_LIKE __attribute__((format(printf, 1, 2)))
#else
#define ZEROPS_PRINTF_LIKE
#endif

ZEROPS_PRINTF_LIKE inline void debug(const char* fmt, ...) {
    va_list args;
    va_start(args, fmt);
    vlog(Level::debug, fmt, args);
    va_end(args);
}

ZEROPS_PRINTF_LIKE inline void info(const char* fmt, ...) {
    va_list args;
    va_start(args, fmt);
    vlog(Level::info, fmt, args);
    va_end(args);
}

ZEROPS_PRINTF_LIKE inline void warn(const char* fmt, ...) {
    va_list args;
    va_start(args, fmt);
    vlog(Level::warn, fmt, args);
    va_end(args);
}

ZEROPS_PRINTF_LIKE inline void error(const char* fmt, ...) {
    va_list args;
    va_start(args, fmt);
    vlog(Level::error, fmt, args);
    va_end(args);
}

#undef ZEROPS_PRINTF_LIKE

}  // namespace zerops::log

#include "mfg/log.hpp"

#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <cstring>

namespace mfg::log {

namespace {

Level initial_level() {
    const char* env = std::getenv("MFG_LOG");
    if (env == nullptr) return Level::off;
    if (std::strcmp(env, "info") == 0) return Level::info;
    if (std::strcmp(env, "debug") == 0) return Level::debug;
    return Level::off;
}

Level& current() {
    static Level value = initial_level();
    return value;
}

void vwrite(const char* tag, const char* format, std::va_list args) {
    std::fprintf(stderr, "[%s] ", tag);
    std::vfprintf(stderr, format, args);
    std::fputc('\n', stderr);
}

} // namespace

Level level() { return current(); }

void set_level(Level level) { current() = level; }

void info(const char* format, ...) {
    if (!info_enabled()) return;
    std::va_list args;
    va_start(args, format);
    vwrite("info", format, args);
    va_end(args);
}

void debug(const char* format, ...) {
    if (!debug_enabled()) return;
    std::va_list args;
    va_start(args, format);
    vwrite("debug", format, args);
    va_end(args);
}

} // namespace mfg::log

#pragma once

namespace mfg::log {

enum class Level { off = 0, info = 1, debug = 2 };

/// Current threshold. Initialized once from the MFG_LOG environment variable
/// ("off", "info", or "debug"; anything else falls back to "off").
Level level();

/// Override the threshold programmatically (tests, CLI flags).
void set_level(Level level);

inline bool info_enabled() { return level() >= Level::info; }
inline bool debug_enabled() { return level() >= Level::debug; }

/// printf-style messages to stderr, dropped when below the threshold.
void info(const char* format, ...) __attribute__((format(printf, 1, 2)));
void debug(const char* format, ...) __attribute__((format(printf, 1, 2)));

} // namespace mfg::log

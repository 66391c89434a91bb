#pragma once

#include <functional>
#include <string_view>

namespace clwe::log {

enum class Level { debug, info, warn, error };

using Sink = std::function<void(Level, std::string_view)>;

// Messages below the threshold are dropped. Default threshold is warn.
void set_level(Level level);
Level level();

// Replaces the stderr sink. Passing an empty function restores it.
void set_sink(Sink sink);

void write(Level level, std::string_view message);

inline void debug(std::string_view m) { write(Level::debug, m); }
inline void info(std::string_view m) { write(Level::info, m); }
inline void warn(std::string_view m) { write(Level::warn, m); }
inline void error(std::string_view m) { write(Level::error, m); }

}  // namespace clwe::log

#pragma once

#include <functional>
#include <string>

namespace ipsr::log {

enum class Level { debug, info, warn, error, off };

void set_level(Level level);
Level level();

/// Replaces the stderr sink (tests capture notices through this).
void set_sink(std::function<void(Level, const std::string&)> sink);

void debug(const std::string& msg);
void info(const std::string& msg);
void warn(const std::string& msg);

}  // namespace ipsr::log

#include "ipsr/log.hpp"

#include <atomic>
#include <iostream>
#include <mutex>

namespace ipsr::log {

namespace {

std::atomic<Level> g_level{Level::warn};
std::mutex g_mutex;
std::function<void(Level, const std::string&)> g_sink;

const char* tag(Level l) {
  switch (l) {
    case Level::debug: return "debug";
    case Level::info: return "info";
    case Level::warn: return "warning";
    default: return "error";
  }
}

void emit(Level l, const std::string& msg) {
  if (l < g_level.load()) return;
  std::lock_guard lock(g_mutex);
  if (g_sink) {
    g_sink(l, msg);
  } else {
    std::cerr << "[ipsr " << tag(l) << "] " << msg << '\n';
  }
}

}  // namespace

void set_level(Level level) { g_level = level; }
Level level() { return g_level.load(); }

void set_sink(std::function<void(Level, const std::string&)> sink) {
  std::lock_guard lock(g_mutex);
  g_sink = std::move(sink);
}

void debug(const std::string& msg) { emit(Level::debug, msg); }
void info(const std::string& msg) { emit(Level::info, msg); }
void warn(const std::string& msg) { emit(Level::warn, msg); }

}  // namespace ipsr::log

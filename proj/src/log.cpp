#include "decmdp/log.hpp"

#include <iostream>
#include <mutex>
#include <set>

namespace decmdp::log {

namespace {
Level g_level = Level::warn;
std::mutex g_mutex;
std::set<std::string, std::less<>> g_seen;
}  // namespace

void set_level(Level level) { g_level = level; }
Level level() { return g_level; }

void warn(const std::string& msg) {
  if (g_level == Level::quiet) return;
  std::lock_guard<std::mutex> lock(g_mutex);
  std::cerr << "warning: " << msg << '\n';
}

void warn_once(std::string_view key, const std::string& msg) {
  {
    std::lock_guard<std::mutex> lock(g_mutex);
    if (!g_seen.emplace(key).second) return;
  }
  warn(msg);
}

void info(const std::string& msg) {
  if (g_level != Level::info) return;
  std::lock_guard<std::mutex> lock(g_mutex);
  std::cerr << msg << '\n';
}

}  // namespace decmdp::log

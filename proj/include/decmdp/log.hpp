#pragma once

#include <string>
#include <string_view>

namespace decmdp::log {

enum class Level { quiet, warn, info };

void set_level(Level level);
Level level();

void warn(const std::string& msg);
/// Emits `msg` only the first time `key` is seen.
void warn_once(std::string_view key, const std::string& msg);
void info(const std::string& msg);

}  // namespace decmdp::log

#include "decmdp/io/keyvalue.hpp"

#include <zlib.h>

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "decmdp/errors.hpp"

namespace decmdp::io {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

[[noreturn]] void fail(const std::string& origin, std::size_t line, const std::string& msg) {
  throw ConfigError(origin + ":" + std::to_string(line) + ": " + msg);
}

}  // namespace

std::uint32_t crc32(std::string_view bytes) {
  uLong crc = ::crc32(0L, Z_NULL, 0);
  crc = ::crc32(crc, reinterpret_cast<const Bytef*>(bytes.data()), static_cast<uInt>(bytes.size()));
  return static_cast<std::uint32_t>(crc);
}

std::string with_checksum(std::string_view body) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%08x", crc32(body));
  std::string out(body);
  out += "checksum = ";
  out += buf;
  out += '\n';
  return out;
}

KeyValue KeyValue::parse(std::string_view text, std::string_view origin) {
  KeyValue kv;
  kv.origin_ = std::string(origin);
  std::size_t pos = 0;
  std::size_t line_no = 0;
  while (pos < text.size()) {
    const std::size_t line_start = pos;
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;

    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) fail(kv.origin_, line_no, "expected 'key = value'");
    const std::string key(trim(line.substr(0, eq)));
    const std::string value(trim(line.substr(eq + 1)));
    if (key.empty()) fail(kv.origin_, line_no, "empty key");

    if (key == "checksum") {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%08x", crc32(text.substr(0, line_start)));
      if (value != buf) {
        fail(kv.origin_, line_no, "checksum mismatch (file says " + value + ", content is " + buf + ")");
      }
      continue;
    }
    kv.values_[key] = value;
  }
  return kv;
}

KeyValue KeyValue::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), path.string());
}

void KeyValue::merge(const KeyValue& other) {
  for (const auto& [k, v] : other.values_) values_[k] = v;
}

std::string KeyValue::get_string(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError("missing config key '" + key + "'");
  return it->second;
}

double KeyValue::get_double(const std::string& key) const {
  const std::string s = get_string(key);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw ConfigError("config key '" + key + "': not a number: " + s);
  }
  return v;
}

std::int64_t KeyValue::get_int(const std::string& key) const {
  const std::string s = get_string(key);
  std::int64_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw ConfigError("config key '" + key + "': not an integer: " + s);
  }
  return v;
}

bool KeyValue::get_bool(const std::string& key) const {
  const std::string s = get_string(key);
  if (s == "true" || s == "1" || s == "on" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "off" || s == "no") return false;
  throw ConfigError("config key '" + key + "': not a boolean: " + s);
}

std::vector<double> KeyValue::get_doubles(const std::string& key) const {
  const std::string s = get_string(key);
  std::vector<double> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == ',' || s[i] == '\t')) ++i;
    if (i >= s.size()) break;
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data() + i, s.data() + s.size(), v);
    if (ec != std::errc()) throw ConfigError("config key '" + key + "': bad number list: " + s);
    out.push_back(v);
    i = static_cast<std::size_t>(ptr - s.data());
  }
  return out;
}

std::string KeyValue::get_string(const std::string& key, const std::string& fallback) const {
  return contains(key) ? get_string(key) : fallback;
}
double KeyValue::get_double(const std::string& key, double fallback) const {
  return contains(key) ? get_double(key) : fallback;
}
std::int64_t KeyValue::get_int(const std::string& key, std::int64_t fallback) const {
  return contains(key) ? get_int(key) : fallback;
}
bool KeyValue::get_bool(const std::string& key, bool fallback) const {
  return contains(key) ? get_bool(key) : fallback;
}

std::string KeyValue::to_string() const {
  std::string out;
  for (const auto& [k, v] : values_) {
    out += k;
    out += " = ";
    out += v;
    out += '\n';
  }
  return out;
}

std::string format_exact(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

const KeyValue& builtin_defaults() {
  static const KeyValue kv = KeyValue::parse(builtin_defaults_text(), "defaults.conf");
  return kv;
}

std::string builtin_defaults_checksum() {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%08x", crc32(builtin_defaults_text()));
  return buf;
}

}  // namespace decmdp::io

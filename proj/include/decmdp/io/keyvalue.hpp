#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace decmdp::io {

/// Plain-text `key = value` document. `#` starts a comment; blank lines are
/// ignored; later keys override earlier ones. A trailing
/// `checksum = <hex>` line, when present, must match the CRC-32 of every
/// preceding byte of the document.
class KeyValue {
 public:
  KeyValue() = default;

  static KeyValue parse(std::string_view text, std::string_view origin = "<string>");
  static KeyValue load(const std::filesystem::path& path);

  bool contains(const std::string& key) const { return values_.count(key) != 0; }
  void set(const std::string& key, std::string value) { values_[key] = std::move(value); }

  /// Keys present in `other` replace ours.
  void merge(const KeyValue& other);

  std::string get_string(const std::string& key) const;
  double get_double(const std::string& key) const;
  std::int64_t get_int(const std::string& key) const;
  bool get_bool(const std::string& key) const;
  std::vector<double> get_doubles(const std::string& key) const;

  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  std::int64_t get_int(const std::string& key, std::int64_t fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;

  const std::map<std::string, std::string>& entries() const noexcept { return values_; }

  /// Serialized form, keys sorted.
  std::string to_string() const;

 private:
  std::map<std::string, std::string> values_;
  std::string origin_;
};

std::uint32_t crc32(std::string_view bytes);

/// Appends a `checksum = ...` line covering `body`.
std::string with_checksum(std::string_view body);

/// Shipped defaults, compiled in from config/defaults.conf.
std::string_view builtin_defaults_text();
const KeyValue& builtin_defaults();
std::string builtin_defaults_checksum();

/// Formats a double so it parses back to the identical value.
std::string format_exact(double v);

}  // namespace decmdp::io

#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "decmdp/io/keyvalue.hpp"

namespace decmdp::io {

/// Build identifier: project version, compiler and active SIMD kernel.
std::string build_id();

/// Output directory: WENO_DECMDP_OUT when set, else `fallback`.
std::filesystem::path output_directory(const std::filesystem::path& fallback);

/// Record of one CLI run. Written to `<dir>/manifest.txt` before any
/// output, then rewritten with the output list and status at the end.
class RunManifest {
 public:
  RunManifest(std::string command, KeyValue config, std::uint64_t seed, std::filesystem::path dir);

  const std::filesystem::path& directory() const noexcept { return dir_; }
  std::filesystem::path path() const { return dir_ / "manifest.txt"; }
  const KeyValue& config() const noexcept { return config_; }

  /// Creates the directory and writes the manifest with status = running.
  void begin();
  /// Registers a file written under the directory; returns its full path.
  std::filesystem::path output(const std::string& name);
  /// Rewrites the manifest with status, wall-clock seconds and every output.
  void finish(const std::string& status);

  const std::vector<std::string>& outputs() const noexcept { return outputs_; }

  std::string to_string(const std::string& status) const;

 private:
  std::string command_;
  KeyValue config_;
  std::uint64_t seed_;
  std::filesystem::path dir_;
  std::vector<std::string> outputs_;
  std::chrono::steady_clock::time_point start_;
};

}  // namespace decmdp::io

#include "decmdp/io/manifest.hpp"

#include <cstdlib>
#include <ctime>
#include <fstream>
#include <sstream>

#include "decmdp/errors.hpp"
#include "decmdp/simd/kernels.hpp"

#ifndef DECMDP_VERSION
#define DECMDP_VERSION "0.0.0"
#endif

namespace decmdp::io {

std::string build_id() {
  std::string id = "weno-decmdp " DECMDP_VERSION;
#if defined(__clang__)
  id += " clang " __clang_version__;
#elif defined(__GNUC__)
  id += " gcc " __VERSION__;
#endif
  id += " simd=";
  id += simd::isa_name(simd::active_isa());
  return id;
}

std::filesystem::path output_directory(const std::filesystem::path& fallback) {
  if (const char* env = std::getenv("WENO_DECMDP_OUT"); env && *env) return env;
  return fallback;
}

RunManifest::RunManifest(std::string command, KeyValue config, std::uint64_t seed, std::filesystem::path dir)
    : command_(std::move(command)), config_(std::move(config)), seed_(seed), dir_(std::move(dir)),
      start_(std::chrono::steady_clock::now()) {}

std::string RunManifest::to_string(const std::string& status) const {
  std::ostringstream out;
  out << "# weno-decmdp run manifest\n";
  out << "command = " << command_ << '\n';
  out << "build = " << build_id() << '\n';
  out << "seed = " << seed_ << '\n';
  out << "output_dir = " << dir_.string() << '\n';
  const std::time_t now = std::time(nullptr);
  char stamp[32];
  std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  out << "timestamp = " << stamp << '\n';
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  out << "wall_clock_seconds = " << wall << '\n';
  out << "status = " << status << '\n';
  out << "outputs =";
  for (const auto& o : outputs_) out << ' ' << o;
  out << '\n';
  for (const auto& [k, v] : config_.entries()) out << "config." << k << " = " << v << '\n';
  return out.str();
}

void RunManifest::begin() {
  std::filesystem::create_directories(dir_);
  finish("running");
}

std::filesystem::path RunManifest::output(const std::string& name) {
  outputs_.push_back(name);
  return dir_ / name;
}

void RunManifest::finish(const std::string& status) {
  std::ofstream out(path(), std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path().string());
  out << to_string(status);
}

}  // namespace decmdp::io

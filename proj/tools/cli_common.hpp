#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "decmdp/env/environment.hpp"
#include "decmdp/env/solve2d.hpp"
#include "decmdp/io/csv.hpp"
#include "decmdp/io/keyvalue.hpp"
#include "decmdp/io/manifest.hpp"
#include "decmdp/training/training.hpp"

namespace decmdp::cli {

enum ExitCode : int { kOk = 0, kFailure = 1, kConfigError = 2, kBlowUp = 3 };

/// Flags shared by every command, plus the key = value overrides collected
/// from command-specific flags.
struct Invocation {
  std::string command;
  std::string config_file;
  std::string out;
  std::string run_id;
  std::string preset;
  bool quiet = false;
  bool verbose = false;
  std::map<std::string, std::string> flags;

  bool given(const std::string& key) const { return flags.count(key) != 0; }
};

void add_common_flags(CLI::App& app, Invocation& inv);

/// Adds `--name` storing its value under `key` in inv.flags.
CLI::Option* add_key(CLI::App& app, const std::string& names, const std::string& key, Invocation& inv,
                     const std::string& help);

/// defaults < config file < preset < flags.
io::KeyValue resolve(const Invocation& inv);

std::vector<std::string> split_list(const std::string& s);
std::vector<std::size_t> split_sizes(const std::string& s);

physics::EquationSpec equation_spec(const io::KeyValue& kv);
env::EpisodeConfig episode_config(const io::KeyValue& kv);
training::TrainConfig train_config(const io::KeyValue& kv);

/// --out, else WENO_DECMDP_OUT, else out/<command>.
std::filesystem::path output_dir(const Invocation& inv);

/// Writes the resolved config as config.txt, loadable with --config.
void write_resolved_config(io::RunManifest& manifest);

/// x,y,<fields> with one row per cell, x fastest.
io::CsvTable snapshot_table_2d(const env::State2D& u);

/// 2D run settings; Kelvin-Helmholtz is always periodic.
env::Config2D config_2d(const io::KeyValue& kv, const std::string& ic, std::size_t cells, double dt, double t_final);

/// Mean of values[first, last).
double mean_of(const std::vector<double>& values, std::size_t first, std::size_t last);

int cmd_solve(const Invocation& inv);
int cmd_train(const Invocation& inv);
int cmd_eval(const Invocation& inv);
int cmd_verify(const Invocation& inv, const std::vector<std::string>& only, const std::string& fault);

}  // namespace decmdp::cli

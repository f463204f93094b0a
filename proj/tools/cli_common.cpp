#include "cli_common.hpp"

#include <fstream>

#include "decmdp/errors.hpp"
#include "decmdp/log.hpp"
#include "decmdp/physics/initial_conditions.hpp"

namespace decmdp::cli {

void add_common_flags(CLI::App& app, Invocation& inv) {
  app.add_option("--config", inv.config_file, "key = value file overriding the built-in defaults");
  app.add_option("--out", inv.out, "output directory (default: $WENO_DECMDP_OUT or out/<command>)");
  app.add_option("--run-id", inv.run_id, "prefix of the output files");
  app.add_flag("--quiet,-q", inv.quiet, "warnings only");
  app.add_flag("--verbose,-v", inv.verbose, "progress messages");
}

CLI::Option* add_key(CLI::App& app, const std::string& names, const std::string& key, Invocation& inv,
                     const std::string& help) {
  return app.add_option_function<std::string>(
      names, [&inv, key](const std::string& v) { inv.flags[key] = v; }, help + " [" + key + "]");
}

io::KeyValue resolve(const Invocation& inv) {
  io::KeyValue kv = io::builtin_defaults();
  if (!inv.config_file.empty()) kv.merge(io::KeyValue::load(inv.config_file));
  if (!inv.preset.empty()) {
    const std::string prefix = "preset." + inv.preset + ".";
    bool found = false;
    const io::KeyValue before = kv;
    for (const auto& [k, v] : before.entries()) {
      if (k.rfind(prefix, 0) == 0) {
        kv.set(k.substr(prefix.size()), v);
        found = true;
      }
    }
    if (!found) throw ConfigError("unknown preset '" + inv.preset + "'");
    kv.set("preset", inv.preset);
  }
  for (const auto& [k, v] : inv.flags) kv.set(k, v);
  return kv;
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= s.size()) {
    auto comma = s.find(',', start);
    if (comma == std::string::npos) comma = s.size();
    std::string item = s.substr(start, comma - start);
    item.erase(0, item.find_first_not_of(" \t"));
    item.erase(item.find_last_not_of(" \t") + 1);
    if (!item.empty()) out.push_back(item);
    start = comma + 1;
  }
  return out;
}

std::vector<std::size_t> split_sizes(const std::string& s) {
  std::vector<std::size_t> out;
  for (const auto& item : split_list(s)) {
    std::size_t pos = 0;
    long long v = 0;
    try {
      v = std::stoll(item, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    if (pos != item.size() || v < 0) throw ConfigError("expected a non-negative integer, got '" + item + "'");
    out.push_back(static_cast<std::size_t>(v));
  }
  return out;
}

physics::EquationSpec equation_spec(const io::KeyValue& kv) {
  physics::EquationSpec spec;
  spec.kind = physics::equation_from_name(kv.get_string("equation"));
  spec.gamma = kv.get_double("gamma");
  spec.validate();
  return spec;
}

namespace {

std::size_t get_size(const io::KeyValue& kv, const std::string& key) {
  const auto v = kv.get_int(key);
  if (v < 0) throw ConfigError(key + " must not be negative");
  return static_cast<std::size_t>(v);
}

}  // namespace

env::EpisodeConfig episode_config(const io::KeyValue& kv) {
  env::EpisodeConfig cfg;
  cfg.spec = equation_spec(kv);
  cfg.ic = kv.get_string("ic");
  cfg.cells = get_size(kv, "cells");
  cfg.dt = kv.get_double("dt");
  cfg.steps = get_size(kv, "steps");
  cfg.boundary = physics::boundary_from_name(kv.get_string("boundary"));
  cfg.reward = env::reward_from_name(kv.get_string("reward"));
  cfg.coeffs.eps = kv.get_double("weno.eps");
  cfg.alpha_gradient = kv.get_bool("alpha_gradient");
  cfg.problem = kv;
  return cfg;
}

training::TrainConfig train_config(const io::KeyValue& kv) {
  training::TrainConfig tc;
  tc.episode = episode_config(kv);
  tc.episodes = get_size(kv, "episodes");
  tc.adam.lr = kv.get_double("lr");
  tc.adam.beta1 = kv.get_double("adam.beta1");
  tc.adam.beta2 = kv.get_double("adam.beta2");
  tc.adam.eps = kv.get_double("adam.eps");
  tc.lr_final_factor = kv.get_double("lr_final_factor");
  tc.clip = kv.get_double("clip");
  tc.checkpoint_every = get_size(kv, "checkpoint_every");
  tc.seed = static_cast<std::uint64_t>(kv.get_int("seed"));
  tc.input = policy::input_mode_from_name(kv.get_string("normalize"));
  return tc;
}

std::filesystem::path output_dir(const Invocation& inv) {
  if (!inv.out.empty()) return inv.out;
  return io::output_directory(std::filesystem::path("out") / inv.command);
}

void write_resolved_config(io::RunManifest& manifest) {
  const auto path = manifest.output("config.txt");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << "# Resolved configuration of this run; pass it back with --config.\n";
  out << manifest.config().to_string();
}

io::CsvTable snapshot_table_2d(const env::State2D& u) {
  io::CsvTable t;
  t.header = {"x", "y", "rho", "rho_u", "rho_v", "rho_E"};
  for (std::size_t j = 0; j < u.ny; ++j) {
    for (std::size_t i = 0; i < u.nx; ++i) {
      t.rows.push_back({u.x_center(i), u.y_center(j), u(0, i, j), u(1, i, j), u(2, i, j), u(3, i, j)});
    }
  }
  return t;
}

env::Config2D config_2d(const io::KeyValue& kv, const std::string& ic, std::size_t cells, double dt, double t_final) {
  env::Config2D c;
  c.ic = ic;
  c.nx = c.ny = cells;
  c.gamma = kv.get_double("gamma");
  c.dt = dt;
  c.t_final = t_final;
  c.boundary = ic == "kelvin-helmholtz" ? physics::Boundary::periodic
                                        : physics::boundary_from_name(kv.get_string("boundary"));
  c.integrator = weno::integrator_from_name(kv.get_string("integrator"));
  c.coeffs.eps = kv.get_double("weno.eps");
  c.problem = kv;
  return c;
}

double mean_of(const std::vector<double>& values, std::size_t first, std::size_t last) {
  last = std::min(last, values.size());
  if (first >= last) return 0.0;
  double s = 0.0;
  for (std::size_t k = first; k < last; ++k) s += values[k];
  return s / static_cast<double>(last - first);
}

}  // namespace decmdp::cli

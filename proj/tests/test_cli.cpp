// Runs the command-line tool and checks exit codes and outputs.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "decmdp/io/csv.hpp"
#include "decmdp/io/keyvalue.hpp"
#include "doctest.h"

namespace fs = std::filesystem;

namespace {

const fs::path& work_dir() {
  static const fs::path dir = [] {
    const fs::path d = fs::temp_directory_path() / "decmdp_test_cli";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

int run(const std::string& args) {
  const std::string cmd = std::string("\"") + WENO_DECMDP_EXE + "\" " + args + " > \"" +
                          (work_dir() / "last.log").string() + "\" 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string out(const std::string& name) { return (work_dir() / name).string(); }

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("usage errors exit with 2") {
  CHECK(run("") == 2);
  CHECK(run("solve --no-such-flag") == 2);
  CHECK(run("solve --ic nope --out " + out("bad_ic")) == 2);
  CHECK(run("solve --n 3 --out " + out("bad_n")) == 2);
  CHECK(run("eval --checkpoint /nonexistent --out " + out("bad_ck")) == 2);
  CHECK(run("verify --only nope --out " + out("bad_group")) == 2);
  CHECK(run("solve --config /nonexistent.conf --out " + out("bad_cfg")) == 2);
}

TEST_CASE("help exits with 0") { CHECK(run("--help") == 0); }

TEST_CASE("solve writes snapshots, manifest and resolved config") {
  REQUIRE(run("solve --ic sod --n 32 --dt 1e-3 --steps 20 --snapshot-every 10 --out " + out("solve")) == 0);
  const fs::path dir = out("solve");
  CHECK(fs::exists(dir / "sod_t0.csv"));
  CHECK(fs::exists(dir / "sod_t10.csv"));
  CHECK(fs::exists(dir / "sod_t20.csv"));
  CHECK(decmdp::io::read_csv(dir / "sod_t20.csv").rows.size() == 32);
  const auto manifest = decmdp::io::KeyValue::load(dir / "manifest.txt");
  CHECK(manifest.get_string("status") == "ok");
  CHECK(manifest.get_string("config.cells") == "32");

  // The resolved config reproduces the run.
  REQUIRE(run("solve --config " + (dir / "config.txt").string() + " --out " + out("solve2")) == 0);
  CHECK(decmdp::io::read_csv(dir / "sod_t20.csv").rows ==
        decmdp::io::read_csv(fs::path(out("solve2")) / "sod_t20.csv").rows);
}

TEST_CASE("flags override the config file") {
  {
    std::ofstream cfg(out("c.conf"));
    cfg << "cells = 16\nsteps = 4\n";
  }
  REQUIRE(run("solve --config " + out("c.conf") + " --n 24 --out " + out("prec")) == 0);
  CHECK(decmdp::io::read_csv(fs::path(out("prec")) / "sod_t4.csv").rows.size() == 24);
}

TEST_CASE("2D solve") {
  REQUIRE(run("solve --equation euler2d --ic kelvin-helmholtz --n 8 --dt 1e-3 --steps 5 --out " + out("kh")) == 0);
  CHECK(fs::exists(fs::path(out("kh")) / "manifest.txt"));
}

TEST_CASE("train and eval") {
  REQUIRE(run("train --ic sod --n 16 --steps 5 --episodes 3 --reward rl-weno,bc-weno --seeds 0 --out " +
              out("train")) == 0);
  const fs::path dir = out("train");
  CHECK(fs::exists(dir / "rl-weno_s0_log.csv"));
  CHECK(fs::exists(dir / "bc-weno_s0_checkpoint.txt"));
  CHECK(fs::exists(dir / "summary.csv"));
  CHECK(decmdp::io::read_csv(dir / "rl-weno_s0_log.csv").rows.size() == 3);
  REQUIRE(run("eval --checkpoint " + (dir / "rl-weno_s0_checkpoint.txt").string() +
              " --ics sod --ns 32 --out " + out("eval")) == 0);
  CHECK(fs::exists(fs::path(out("eval")) / "table.csv"));
}

TEST_CASE("verify reports failures through the exit code") {
  CHECK(run("verify --only reconstruction --out " + out("v_ok")) == 0);
  CHECK(run("verify --only reconstruction --inject-fault candidate-sign --out " + out("v_bad")) == 1);
}

TEST_CASE("output directory from the environment") {
  const std::string env_dir = out("from_env");
  const std::string cmd = "WENO_DECMDP_OUT=\"" + env_dir + "\" \"" + WENO_DECMDP_EXE +
                          "\" solve --n 16 --steps 2 > /dev/null 2>&1";
  REQUIRE(std::system(cmd.c_str()) == 0);
  CHECK(fs::exists(fs::path(env_dir) / "manifest.txt"));
}

}  // TEST_SUITE

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "decmdp/errors.hpp"
#include "decmdp/io/csv.hpp"
#include "decmdp/io/keyvalue.hpp"
#include "decmdp/io/manifest.hpp"
#include "decmdp/io/plot.hpp"
#include "decmdp/physics/initial_conditions.hpp"
#include "doctest.h"

using namespace decmdp;

namespace {

std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("decmdp_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST_SUITE("io") {

TEST_CASE("key-value parsing") {
  const io::KeyValue kv = io::KeyValue::parse("# comment\na = 1\n\nb = x y  # trailing\na = 2.5\nflag = true\n");
  CHECK(kv.get_double("a") == 2.5);
  CHECK(kv.get_string("b") == "x y");
  CHECK(kv.get_bool("flag"));
  CHECK(kv.get_int("missing", 7) == 7);
  CHECK_THROWS_AS(kv.get_double("missing"), ConfigError);
  CHECK_THROWS_AS(kv.get_int("b"), ConfigError);
  CHECK_THROWS_AS(io::KeyValue::parse("no equals sign\n"), ConfigError);
  CHECK(io::KeyValue::parse(kv.to_string()).entries() == kv.entries());
}

TEST_CASE("checksums detect edits") {
  const std::string doc = io::with_checksum("a = 1\nb = 2\n");
  CHECK_NOTHROW(io::KeyValue::parse(doc));
  std::string edited = doc;
  edited.replace(edited.find("b = 2"), 5, "b = 3");
  CHECK_THROWS_AS(io::KeyValue::parse(edited), ConfigError);
  CHECK(io::crc32("123456789") == 0xCBF43926u);
}

TEST_CASE("built-in defaults") {
  const io::KeyValue& d = io::builtin_defaults();
  for (const char* key : {"gamma", "eval.dt", "eval.l2.calibration", "preset.desk.episodes", "ic.sod.left"}) {
    CHECK_MESSAGE(d.contains(key), key);
  }
  CHECK(io::builtin_defaults_checksum().size() == 8);
}

TEST_CASE("exact number formatting") {
  for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, 0.0}) {
    CHECK(std::stod(io::format_exact(v)) == v);
  }
}

TEST_CASE("CSV round trip") {
  const auto dir = scratch_dir("csv");
  io::CsvTable t;
  t.header = {"x", "y"};
  t.rows = {{0.1, 1.0 / 3.0}, {-1e-17, 4.0}};
  io::write_csv(t, dir / "t.csv");
  const io::CsvTable back = io::read_csv(dir / "t.csv");
  CHECK(back.header == t.header);
  CHECK(back.rows == t.rows);
  CHECK(back.values("y") == std::vector<double>{1.0 / 3.0, 4.0});
  CHECK_THROWS_AS(back.column("z"), ConfigError);
  {
    std::ofstream bad(dir / "bad.csv");
    bad << "a,b\n1,2\n3\n";
  }
  CHECK_THROWS_AS(io::read_csv(dir / "bad.csv"), ConfigError);
  CHECK_THROWS_AS(io::read_csv(dir / "none.csv"), ConfigError);
  std::filesystem::remove_all(dir);
}

TEST_CASE("snapshot tables") {
  const auto spec = physics::EquationSpec::euler();
  const physics::State1D u = physics::initial_condition("sod", physics::Grid1D{5, 0.0, 1.0}, spec);
  const io::CsvTable t = io::snapshot_table(u, spec);
  CHECK(t.header.size() == 4);
  CHECK(t.header[0] == "x");
  CHECK(t.rows.size() == 5);
  CHECK(t.rows[0][0] == doctest::Approx(0.1));
  CHECK(io::snapshot_name("sod", 42) == "sod_t42.csv");
}

TEST_CASE("run manifest") {
  const auto dir = scratch_dir("manifest");
  io::KeyValue cfg;
  cfg.set("cells", "64");
  io::RunManifest m("solve", cfg, 3, dir / "run");
  m.begin();
  CHECK(slurp(m.path()).find("status = running") != std::string::npos);
  const auto out = m.output("a.csv");
  CHECK(out == dir / "run" / "a.csv");
  m.finish("ok");
  const io::KeyValue kv = io::KeyValue::load(m.path());
  CHECK(kv.get_string("command") == "solve");
  CHECK(kv.get_string("status") == "ok");
  CHECK(kv.get_int("seed") == 3);
  CHECK(kv.get_string("config.cells") == "64");
  CHECK(kv.get_string("outputs").find("a.csv") != std::string::npos);
  CHECK(kv.get_string("build").find("weno-decmdp") == 0);
  std::filesystem::remove_all(dir);
}

TEST_CASE("plots") {
  const auto dir = scratch_dir("plot");
  io::CsvTable t;
  t.header = {"x", "y", "v"};
  for (int j = 0; j < 3; ++j) {
    for (int i = 0; i < 4; ++i) t.rows.push_back({i + 0.5, j + 0.5, static_cast<double>(i * j)});
  }
  io::write_csv(t, dir / "grid.csv");
  io::LinePlot plot;
  plot.title = "test";
  plot.series.push_back({dir / "grid.csv", "x", "v", "v"});
  io::write_svg_plot(plot, dir / "p.svg");
  CHECK(slurp(dir / "p.svg").find("<svg") != std::string::npos);
  io::write_png_heatmap(dir / "grid.csv", "v", dir / "h.png");
  CHECK(slurp(dir / "h.png").substr(1, 3) == "PNG");
  std::filesystem::remove_all(dir);
}

}  // TEST_SUITE

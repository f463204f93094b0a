#include <cmath>
#include <filesystem>
#include <random>
#include <string>

#include "decmdp/errors.hpp"
#include "decmdp/policy/policy.hpp"
#include "doctest.h"

using namespace decmdp;

TEST_SUITE("policy") {

TEST_CASE("initialization is deterministic and Glorot-bounded") {
  const policy::PolicyParams a = policy::init_params(5);
  const policy::PolicyParams b = policy::init_params(5);
  const policy::PolicyParams c = policy::init_params(6);
  CHECK(a == b);
  CHECK_FALSE(a == c);
  CHECK(a.values.size() == policy::kParamCount);
  policy::PolicyParams p = a;
  const double bound1 = std::sqrt(6.0 / (policy::kInputs + policy::kHidden));
  for (double w : p.w1()) CHECK(std::fabs(w) <= bound1);
  for (double v : p.b1()) CHECK(v == 0.0);
  for (double v : p.b2()) CHECK(v == 0.0);
  for (double v : p.b3()) CHECK(v == 0.0);
}

TEST_CASE("forward pass yields simplex weights") {
  const policy::PolicyParams p = policy::init_params(3);
  std::mt19937_64 rng(2);
  std::normal_distribution<double> d(0.0, 3.0);
  for (int k = 0; k < 200; ++k) {
    const auto in = policy::shape_stencil(d(rng), d(rng), d(rng));
    const auto w = policy::policy_forward(p, in);
    CHECK(w[0] > 0.0);
    CHECK(w[1] > 0.0);
    CHECK(std::fabs(w[0] + w[1] - 1.0) <= 1e-15);
  }
}

TEST_CASE("batched forward equals the per-stencil forward") {
  for (auto mode : {policy::InputMode::off, policy::InputMode::max_abs, policy::InputMode::shape}) {
    const policy::PolicyParams p = policy::init_params(8, mode);
    const std::vector<double> raw = {0.1, 0.5, -0.2, 3.0, 3.0, 3.0, -1e-9, 2e-9, 0.0, 4.0, -2.0, 1.0};
    std::vector<double> w(8);
    policy::policy_forward_batch(p, raw, w);
    for (std::size_t b = 0; b < 4; ++b) {
      const auto x = policy::prepare_input(mode, raw[3 * b], raw[3 * b + 1], raw[3 * b + 2]);
      const auto ref = policy::policy_forward(p, {x, 1.0});
      CHECK(w[2 * b] == doctest::Approx(ref[0]).epsilon(1e-14));
      CHECK(w[2 * b + 1] == doctest::Approx(ref[1]).epsilon(1e-14));
    }
  }
}

TEST_CASE("input preparation") {
  const auto m = policy::normalize_stencil(2.0, -4.0, 1.0);
  CHECK(m.scale == 4.0);
  CHECK(m.x[1] == -1.0);
  const auto s = policy::shape_stencil(1.0, 1.0, 1.0);
  CHECK(s.x[0] == 0.0);
  CHECK(s.x[1] == 0.0);
  CHECK(s.x[2] == doctest::Approx(1.0));
  const auto t = policy::shape_stencil(0.0, 3.0, 7.0);
  CHECK(t.x[0] == doctest::Approx(-0.6));
  CHECK(t.x[1] == doctest::Approx(0.8));
  CHECK(t.scale == doctest::Approx(5.0));
  // Shape inputs are invariant to offset and positive scale.
  const auto u = policy::shape_stencil(10.0, 16.0, 24.0);
  CHECK(u.x[0] == doctest::Approx(t.x[0]));
  CHECK(u.x[1] == doctest::Approx(t.x[1]));
  CHECK(policy::input_mode_from_name("max-abs") == policy::InputMode::max_abs);
  CHECK(policy::input_mode_from_name("true") == policy::InputMode::max_abs);
  CHECK(policy::input_mode_from_name("false") == policy::InputMode::off);
  CHECK_THROWS_AS(policy::input_mode_from_name("batch-norm"), ConfigError);
}

TEST_CASE("checkpoint round trip is exact") {
  policy::Checkpoint ck;
  ck.params = policy::init_params(11, policy::InputMode::max_abs);
  ck.params.values[policy::kB3] = 0.1 + 0.2;
  ck.config_echo.set("lr", "0.001");
  const auto path = std::filesystem::temp_directory_path() / "decmdp_test_checkpoint.txt";
  policy::save_checkpoint(ck, path);
  const policy::Checkpoint back = policy::load_checkpoint(path);
  std::filesystem::remove(path);
  CHECK(back.params == ck.params);
  CHECK(back.config_echo.get_string("lr") == "0.001");
}

TEST_CASE("bad checkpoints are rejected") {
  const std::string good = policy::checkpoint_to_string({policy::init_params(1), {}});
  CHECK_NOTHROW(policy::checkpoint_from_string(good));
  std::string v2 = good;
  v2.replace(v2.find("format_version = 1"), 18, "format_version = 2");
  CHECK_THROWS_AS(policy::checkpoint_from_string(v2), ConfigError);
  std::string shape = good;
  shape.replace(shape.find("layer.0.shape = 64 3"), 20, "layer.0.shape = 32 3");
  CHECK_THROWS_AS(policy::checkpoint_from_string(shape), ConfigError);
  std::string nan = good;
  const auto pos = nan.find("layer.2.bias = ") + 15;
  nan.replace(pos, 1, "nan ");
  CHECK_THROWS_AS(policy::checkpoint_from_string(nan), ConfigError);
  CHECK_THROWS_AS(policy::load_checkpoint("/nonexistent/checkpoint.txt"), ConfigError);
}

TEST_CASE("parameter validation") {
  policy::PolicyParams p = policy::init_params(0);
  p.values[7] = INFINITY;
  CHECK_THROWS_AS(p.validate(), ConfigError);
  p = policy::init_params(0);
  p.values.pop_back();
  CHECK_THROWS_AS(p.validate(), ConfigError);
}

}  // TEST_SUITE

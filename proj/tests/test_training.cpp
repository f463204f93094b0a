#include <cmath>
#include <vector>

#include "decmdp/errors.hpp"
#include "decmdp/training/training.hpp"
#include "doctest.h"

using namespace decmdp;

TEST_SUITE("training") {

TEST_CASE("first Adam step moves each parameter by about lr along the gradient") {
  std::vector<double> p = {1.0, -2.0, 0.5};
  const std::vector<double> g = {0.3, -4.0, 0.0};
  training::AdamState st(3);
  training::AdamHyper h;
  h.lr = 0.01;
  training::adam_step(p, g, st, h);
  CHECK(st.step == 1);
  CHECK(p[0] == doctest::Approx(1.0 + 0.01 * 0.3 / (0.3 + 1e-8)));
  CHECK(p[1] == doctest::Approx(-2.0 - 0.01 * 4.0 / (4.0 + 1e-8)));
  CHECK(p[2] == 0.5);
}

TEST_CASE("Adam bias correction over two steps") {
  std::vector<double> p = {0.0};
  training::AdamState st(1);
  const training::AdamHyper h{0.1, 0.9, 0.999, 1e-8};
  training::adam_step(p, std::vector<double>{1.0}, st, h);
  training::adam_step(p, std::vector<double>{-1.0}, st, h);
  const double m = 0.9 * 0.1 - 0.1;
  const double v = 0.999 * 0.001 + 0.001;
  const double mhat = m / (1.0 - 0.81);
  const double vhat = v / (1.0 - 0.999 * 0.999);
  CHECK(p[0] == doctest::Approx(0.1 + 0.1 * mhat / (std::sqrt(vhat) + 1e-8)));
}

TEST_CASE("global-norm clipping") {
  std::vector<double> g = {3.0, 4.0};
  bool clipped = false;
  CHECK(training::clip_global_norm(g, 1.0, &clipped) == doctest::Approx(5.0));
  CHECK(clipped);
  CHECK(g[0] == doctest::Approx(0.6));
  CHECK(g[1] == doctest::Approx(0.8));
  std::vector<double> small = {0.1, 0.1};
  CHECK(training::clip_global_norm(small, 1.0, &clipped) == doctest::Approx(std::sqrt(0.02)));
  CHECK_FALSE(clipped);
  CHECK(small[0] == 0.1);
}

TEST_CASE("block-mode gradient equals the full-tape gradient") {
  env::EpisodeConfig c;
  c.cells = 12;
  c.steps = 4;
  const policy::PolicyParams p = policy::init_params(13);
  const training::GradientResult a = training::bptts_gradient(p, c, 0.0);
  const training::GradientResult b = training::full_tape_gradient(p, c);
  CHECK(a.episode_return == b.episode_return);
  // Both are exact; they differ only in summation order, so compare against
  // the gradient's scale rather than per coordinate.
  double diff = 0.0, scale = 0.0;
  for (std::size_t k = 0; k < a.gradient.size(); ++k) {
    diff = std::max(diff, std::fabs(a.gradient[k] - b.gradient[k]));
    scale = std::max(scale, std::fabs(b.gradient[k]));
  }
  CHECK(scale > 0.0);
  CHECK(diff <= 1e-12 * scale);
}

TEST_CASE("training is reproducible and improves the return") {
  training::TrainConfig tc;
  tc.episode.cells = 16;
  tc.episode.steps = 10;
  tc.episode.dt = 4e-3;
  tc.episodes = 25;
  tc.adam.lr = 1e-3;
  tc.seed = 2;
  const training::TrainResult a = training::train(tc);
  const training::TrainResult b = training::train(tc);
  CHECK(a.curve == b.curve);
  CHECK(a.checkpoint.params == b.checkpoint.params);
  REQUIRE(a.curve.size() == 25);
  CHECK(a.curve.back() > a.curve.front());
  CHECK(a.checkpoint.config_echo.get_int("episodes") == 25);
}

TEST_CASE("checkpoint hook cadence") {
  training::TrainConfig tc;
  tc.episode.cells = 8;
  tc.episode.steps = 3;
  tc.episodes = 7;
  tc.checkpoint_every = 3;
  std::vector<std::size_t> seen;
  training::TrainHooks hooks;
  hooks.on_checkpoint = [&](std::size_t e, const policy::Checkpoint&) { seen.push_back(e); };
  training::train(tc, hooks);
  CHECK(seen == std::vector<std::size_t>{3, 6, 7});
}

TEST_CASE("training configuration is validated") {
  training::TrainConfig tc;
  tc.episodes = 0;
  CHECK_THROWS_AS(tc.validate(), ConfigError);
  tc = {};
  tc.adam.lr = 0.0;
  CHECK_THROWS_AS(tc.validate(), ConfigError);
  tc = {};
  tc.episode.ic = "sod,nope";
  CHECK_THROWS_AS(tc.validate(), ConfigError);
}

TEST_CASE("L2 metric") {
  physics::State1D a(1, 4, 0.25, 0.0);
  physics::State1D b = a;
  b(0, 1) = 2.0;
  const training::L2Metric m{0, 1.0};
  CHECK(m(a, b) == doctest::Approx(1.0));
  const training::L2Metric scaled{0, 3.0};
  CHECK(scaled(a, b) == doctest::Approx(3.0));
}

}  // TEST_SUITE

#include <cmath>

#include "decmdp/env/environment.hpp"
#include "decmdp/errors.hpp"
#include "decmdp/physics/initial_conditions.hpp"
#include "decmdp/policy/policy.hpp"
#include "decmdp/verify/properties.hpp"
#include "doctest.h"

using namespace decmdp;

TEST_SUITE("env") {

TEST_CASE("observations recover the state") {
  const auto spec = physics::EquationSpec::euler();
  const physics::State1D u = verify::smooth_state(spec, 12, 4);
  const env::ObservationTensor obs = env::observe(u, spec);
  CHECK(obs.fields == 3);
  CHECK(obs.interfaces == 13);
  CHECK(obs.agents() == 3 * 13 * 2);
  const std::vector<double> back = env::reconstruct_state(obs);
  for (std::size_t k = 0; k < u.q.size(); ++k) CHECK(back[k] == doctest::Approx(u.q[k]).epsilon(1e-12));
}

TEST_CASE("the oracle reproduces the classical fluxes") {
  const auto spec = physics::EquationSpec::euler();
  const physics::State1D u = physics::initial_condition("lax", physics::Grid1D{24, 0.0, 1.0}, spec);
  const env::ObservationTensor obs = env::observe(u, spec);
  const env::ActionTensor a = env::act(env::WenoOracle{}, obs);
  a.validate();
  const std::vector<double> got = env::apply_actions(obs, a);
  const std::vector<double> ref = weno::weno_fluxes(u, spec, {});
  REQUIRE(got.size() == ref.size());
  for (std::size_t k = 0; k < got.size(); ++k) CHECK(got[k] == doctest::Approx(ref[k]).epsilon(1e-14));
}

TEST_CASE("policy actions are valid and per-agent") {
  const auto spec = physics::EquationSpec::euler();
  const physics::State1D u = physics::initial_condition("sod", physics::Grid1D{16, 0.0, 1.0}, spec);
  const env::ObservationTensor obs = env::observe(u, spec);
  const policy::PolicyParams p = policy::init_params(2);
  const env::ActionTensor a = env::act(p, obs);
  CHECK_NOTHROW(a.validate());
  for (std::size_t i = 0; i < obs.interfaces; i += 5) {
    const double raw[3] = {obs(1, i, 1, 0), obs(1, i, 1, 1), obs(1, i, 1, 2)};
    const auto x = policy::prepare_input(p.input, raw[0], raw[1], raw[2]);
    const auto w = policy::policy_forward(p, policy::StencilInput<double>{x, 1.0});
    CHECK(a(1, i, 1, 0) == doctest::Approx(w[0]).epsilon(1e-14));
    CHECK(a(1, i, 1, 1) == doctest::Approx(w[1]).epsilon(1e-14));
  }
}

TEST_CASE("action validation") {
  env::ActionTensor a;
  a.fields = 1;
  a.interfaces = 1;
  a.weights = {0.5, 0.5, 0.3, 0.7};
  CHECK_NOTHROW(a.validate());
  a.weights = {0.5, 0.5, 0.3, 0.8};
  CHECK_THROWS_AS(a.validate(), ConfigError);
  a.weights = {1.5, -0.5, 0.3, 0.7};
  CHECK_THROWS_AS(a.validate(), ConfigError);
}

TEST_CASE("interface rewards split cell errors") {
  physics::State1D ref(1, 3, 1.0 / 3.0, 0.0);
  physics::State1D next = ref;
  next(0, 0) = 0.2;
  next(0, 2) = -0.4;
  const std::vector<double> r = env::interface_rewards(next, ref);
  REQUIRE(r.size() == 4);
  CHECK(r[0] == doctest::Approx(-0.1));
  CHECK(r[1] == doctest::Approx(-0.1));
  CHECK(r[2] == doctest::Approx(-0.2));
  CHECK(r[3] == doctest::Approx(-0.2));
  CHECK(r[0] + r[1] + r[2] + r[3] == doctest::Approx(-0.6));
}

TEST_CASE("behaviour-cloning reference must cover the step") {
  physics::State1D s(1, 5, 0.2, 0.0);
  const std::vector<physics::State1D> traj = {s, s};
  CHECK_NOTHROW(env::reward_bc(s, traj, 1));
  CHECK_THROWS_AS(env::reward_bc(s, traj, 2), ConfigError);
}

TEST_CASE("episode configuration is validated") {
  env::EpisodeConfig c;
  c.steps = 0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = {};
  c.cells = 3;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = {};
  c.dt = 1.0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = {};
  CHECK_NOTHROW(c.validate());
  CHECK_THROWS_AS(env::reward_from_name("bc-exact"), ConfigError);
}

TEST_CASE("episodes under every reward") {
  for (auto kind : {env::RewardKind::rl_weno, env::RewardKind::bc_weno, env::RewardKind::bc_analytical}) {
    env::EpisodeConfig c;
    c.cells = 16;
    c.steps = 5;
    c.reward = kind;
    const env::EpisodeResult oracle = env::run_episode(env::WenoOracle{}, c);
    const env::EpisodeResult policy = env::run_episode(policy::init_params(1), c);
    CHECK(oracle.trajectory.size() == 6);
    CHECK(oracle.rewards.steps() == 5);
    CHECK(policy.total_return <= 0.0);
    CHECK_FALSE(policy.diverged);
    if (kind != env::RewardKind::bc_analytical) CHECK(oracle.total_return == 0.0);
  }
}

// One Burgers step from a constant state u = 1 on 5 periodic cells. There the
// smoothness indicators are stationary, so the weights do not move to first
// order and alpha drops out (its plus and minus contributions cancel). The
// Jacobian is the linear upwind-biased stencil with the ideal weights:
//   du1_j/du0_k = -lam/6, lam, 1 - lam/2, -lam/3 for k = j-2 .. j+1,
// with lam = u dt / dx and flux derivative u = 1.
TEST_CASE("hand-derived Jacobian of one Burgers step") {
  env::EpisodeConfig c;
  c.spec = physics::EquationSpec::burgers();
  c.boundary = physics::Boundary::periodic;
  physics::State1D u0(1, 5, 0.2, 0.0);
  for (auto& v : u0.q) v = 1.0;
  c.initial_state = u0;
  c.steps = 1;
  c.dt = 0.05;
  const double lam = c.dt / u0.dx;
  const env::EpisodeResult ep = env::run_episode(env::WenoOracle{}, c, env::TapeMode::full);
  for (std::size_t j = 0; j < 5; ++j) {
    const ad::GradientMap g = ep.tape->backward(ep.state_ids[1][j]);
    for (std::size_t k = 0; k < 5; ++k) {
      const int d = static_cast<int>((k + 5 - j) % 5);  // k - j modulo 5
      double expected = 0.0;
      if (d == 3) expected = -lam / 6.0;  // j - 2
      if (d == 4) expected = lam;         // j - 1
      if (d == 0) expected = 1.0 - lam / 2.0;
      if (d == 1) expected = -lam / 3.0;  // j + 1
      CHECK_MESSAGE(g[ep.state_ids[0][k]] == doctest::Approx(expected).epsilon(1e-12), "j=", j, " k=", k);
    }
  }
}

// On a periodic grid the cell sum is invariant for any weights, so every
// column of the one-step Jacobian sums to one, policy weights included.
TEST_CASE("one-step Jacobian columns sum to one on a periodic grid") {
  env::EpisodeConfig c;
  c.spec = physics::EquationSpec::euler();
  c.boundary = physics::Boundary::periodic;
  c.initial_state = verify::smooth_state(c.spec, 8, 2);
  c.steps = 1;
  c.dt = 2e-3;
  const env::EpisodeResult ep = env::run_episode(policy::init_params(4), c, env::TapeMode::full);
  const std::size_t n = c.initial_state->q.size();
  std::vector<double> column_sum(n, 0.0);
  for (std::size_t f = 0; f < 3; ++f) {
    for (std::size_t j = 0; j < 8; ++j) {
      const ad::GradientMap g = ep.tape->backward(ep.state_ids[1][f * 8 + j]);
      for (std::size_t k = 0; k < n; ++k) column_sum[k] += (k / 8 == f) ? g[ep.state_ids[0][k]] : 0.0;
    }
  }
  for (double v : column_sum) CHECK(v == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("block and full tapes agree on parameter gradients") {
  const verify::PropertyResult r = verify::block_vs_full_tape();
  CHECK_MESSAGE(r.passed, r.detail);
}

}  // TEST_SUITE

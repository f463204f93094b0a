#include "decmdp/verify/properties.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>
#include <set>

#include "decmdp/env/environment.hpp"
#include "decmdp/env/solve2d.hpp"
#include "decmdp/physics/euler.hpp"
#include "decmdp/physics/initial_conditions.hpp"
#include "decmdp/policy/policy.hpp"
#include "decmdp/training/training.hpp"

namespace decmdp::verify {

namespace {

double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

std::string fmt(const char* f, double a, double b = 0.0) {
  char buf[160];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}

PropertyResult make(std::string name, std::string group, double value, double tol, std::string detail = {}) {
  PropertyResult r;
  r.name = std::move(name);
  r.group = std::move(group);
  r.value = value;
  r.tolerance = tol;
  r.passed = value <= tol;
  r.detail = std::move(detail);
  return r;
}

env::EpisodeConfig sod_config(std::size_t cells, std::size_t steps) {
  env::EpisodeConfig cfg;
  cfg.cells = cells;
  cfg.steps = steps;
  return cfg;
}

}  // namespace

physics::State1D smooth_state(const physics::EquationSpec& spec, std::size_t cells, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const double ph[3] = {2.0 * std::numbers::pi * unit(rng), 2.0 * std::numbers::pi * unit(rng),
                        2.0 * std::numbers::pi * unit(rng)};
  const auto grid = physics::Grid1D{cells, 0.0, 1.0};
  physics::State1D u(spec.fields(), cells, grid.dx(), 0.0);
  const double k = 2.0 * std::numbers::pi;
  for (std::size_t j = 0; j < cells; ++j) {
    const double x = grid.x_center(j);
    if (spec.kind == physics::EquationKind::burgers1d) {
      u(0, j) = 0.5 + 0.3 * std::sin(k * x + ph[0]);
      continue;
    }
    const physics::Primitive w{1.0 + 0.2 * std::sin(k * x + ph[0]), 0.3 * std::sin(k * x + ph[1]),
                               1.0 + 0.2 * std::cos(k * x + ph[2])};
    const auto U = physics::to_conserved(w, spec.gamma);
    for (std::size_t f = 0; f < 3; ++f) u(f, j) = U[f];
  }
  return u;
}

PropertyResult gradient_vs_finite_differences(const GradientCheckOptions& opt) {
  const env::EpisodeConfig cfg = sod_config(opt.cells, opt.steps);
  const policy::PolicyParams p = policy::init_params(opt.param_seed);
  const training::GradientResult g = training::bptts_gradient(p, cfg, 0.0);
  std::mt19937_64 rng(opt.coordinate_seed);
  std::set<std::size_t> coords;
  while (coords.size() < opt.coordinates) coords.insert(static_cast<std::size_t>(rng() % policy::kParamCount));
  double worst = 0.0;
  std::size_t worst_k = 0;
  for (std::size_t k : coords) {
    policy::PolicyParams pp = p, pm = p;
    pp.values[k] += opt.h;
    pm.values[k] -= opt.h;
    const double fd =
        (env::run_episode(pp, cfg).total_return - env::run_episode(pm, cfg).total_return) / (2.0 * opt.h);
    const double rel = std::fabs(g.gradient[k] - fd) / (std::fabs(fd) + 1e-12);
    if (rel >= worst) worst = rel, worst_k = k;
  }
  return make("gradient-vs-finite-differences", "grad", worst, opt.tolerance,
              fmt("max relative error over %g coordinates, worst at %g", static_cast<double>(coords.size()),
                  static_cast<double>(worst_k)));
}

PropertyResult block_vs_full_tape() {
  const env::EpisodeConfig cfg = sod_config(16, 5);
  const policy::PolicyParams p = policy::init_params(3);
  const auto b = training::bptts_gradient(p, cfg, 0.0);
  const auto f = training::full_tape_gradient(p, cfg);
  double diff = 0.0, scale = 0.0;
  for (std::size_t k = 0; k < b.gradient.size(); ++k) {
    diff = std::max(diff, std::fabs(b.gradient[k] - f.gradient[k]));
    scale = std::max(scale, std::fabs(f.gradient[k]));
  }
  return make("block-vs-full-tape", "tape", diff / scale, 1e-9, "max |difference| / max |gradient|");
}

namespace {

// Signs of every reward residual and the splitting arg-max cell of a one-step
// episode; FD intervals that change it straddle a kink.
std::vector<int> kink_signature(const env::EpisodeResult& ep, const env::EpisodeConfig& cfg,
                                const policy::PolicyParams& p) {
  const physics::State1D& u = ep.trajectory[0];
  const physics::State1D ref = weno::weno_step(u, cfg.spec, cfg.dt, cfg.solver_options(), 1);
  std::vector<int> sig;
  for (std::size_t k = 0; k < ref.q.size(); ++k) {
    const double r = ep.trajectory[1].q[k] - ref.q[k];
    sig.push_back((r > 0.0) - (r < 0.0));
  }
  std::size_t arg = 0;
  double best = -1.0;
  for (std::size_t j = 0; j < u.cells; ++j) {
    const double a = physics::euler_wave_speed(u(0, j), u(1, j), u(2, j), cfg.spec.gamma);
    if (a > best) best = a, arg = j;
  }
  sig.push_back(static_cast<int>(arg));
  // ReLU activation pattern of every agent.
  const env::ObservationTensor obs = env::observe(u, cfg.spec, cfg.boundary);
  const double* w = p.values.data();
  for (std::size_t a = 0; a < obs.agents(); ++a) {
    const double* st = &obs.values[3 * a];
    const auto x = policy::prepare_input(p.input, st[0], st[1], st[2]);
    double h1[policy::kHidden];
    for (std::size_t o = 0; o < policy::kHidden; ++o) {
      double acc = w[policy::kB1 + o];
      for (std::size_t k = 0; k < policy::kInputs; ++k) acc += w[policy::kW1 + o * policy::kInputs + k] * x[k];
      sig.push_back(acc > 0.0);
      h1[o] = std::max(acc, 0.0);
    }
    for (std::size_t o = 0; o < policy::kHidden; ++o) {
      double acc = w[policy::kB2 + o];
      for (std::size_t k = 0; k < policy::kHidden; ++k) acc += w[policy::kW2 + o * policy::kHidden + k] * h1[k];
      sig.push_back(acc > 0.0);
    }
  }
  return sig;
}

}  // namespace

PropertyResult step_gradient() {
  const auto spec = physics::EquationSpec::euler();
  env::EpisodeConfig cfg;
  cfg.initial_state = smooth_state(spec, 16, 11);
  cfg.steps = 1;
  cfg.dt = 2e-3;
  const policy::PolicyParams p = policy::init_params(5);
  const env::EpisodeResult res = env::run_episode(p, cfg, env::TapeMode::full);
  const ad::GradientMap adj = res.tape->backward(res.return_node);
  const std::vector<int> base = kink_signature(res, cfg, p);
  const double h = 1e-5;
  double worst = 0.0;
  std::size_t skipped = 0;
  for (std::size_t k = 0; k < cfg.initial_state->q.size(); ++k) {
    env::EpisodeConfig cp = cfg, cm = cfg;
    cp.initial_state->q[k] += h;
    cm.initial_state->q[k] -= h;
    const env::EpisodeResult ep = env::run_episode(p, cp);
    const env::EpisodeResult em = env::run_episode(p, cm);
    if (kink_signature(ep, cp, p) != base || kink_signature(em, cm, p) != base) {
      ++skipped;
      continue;
    }
    const double fd = (ep.total_return - em.total_return) / (2.0 * h);
    worst = std::max(worst, std::fabs(adj[res.state_ids[0][k]] - fd) / (std::fabs(fd) + 1e-12));
  }
  return make("step-gradient", "grad", worst, 1e-4,
              fmt("one step, h = 1e-5; %g of %g coordinates skipped (interval crosses a kink)",
                  static_cast<double>(skipped), static_cast<double>(cfg.initial_state->q.size())));
}

PropertyResult action_simplex(std::size_t samples) {
  std::mt19937_64 rng(17);
  double worst = 0.0;
  std::size_t outside = 0;
  for (auto mode : {policy::InputMode::shape, policy::InputMode::max_abs}) {
    const policy::PolicyParams p = policy::init_params(21, mode);
    std::vector<double> raw(3 * samples), w(2 * samples);
    for (double& v : raw) v = (2.0 * unit(rng) - 1.0) * std::pow(10.0, 6.0 * unit(rng) - 3.0);
    policy::policy_forward_batch(p, raw, w);
    for (std::size_t b = 0; b < samples; ++b) {
      if (!(w[2 * b] > 0.0 && w[2 * b] < 1.0 && w[2 * b + 1] > 0.0 && w[2 * b + 1] < 1.0)) ++outside;
      worst = std::max(worst, std::fabs(w[2 * b] + w[2 * b + 1] - 1.0));
    }
  }
  auto r = make("action-simplex", "simplex", worst, 1e-12,
                fmt("max |w0 + w1 - 1| over %g stencils per input mode; %g weights outside (0,1)",
                    static_cast<double>(samples), static_cast<double>(outside)));
  r.passed = r.passed && outside == 0;
  return r;
}

PropertyResult periodic_conservation(std::size_t steps) {
  const auto spec = physics::EquationSpec::euler();
  const physics::State1D u0 = smooth_state(spec, 64, 5);
  const double dt = 2e-3;
  weno::SolverOptions opt;
  opt.boundary = physics::Boundary::periodic;
  const physics::State1D weno_end = weno::weno_solve_steps(u0, spec, steps, dt, opt).final_state();
  env::EpisodeConfig cfg;
  cfg.initial_state = u0;
  cfg.boundary = physics::Boundary::periodic;
  cfg.steps = steps;
  cfg.dt = dt;
  const env::EpisodeResult ep = env::run_episode(policy::init_params(9), cfg);
  if (ep.diverged) return make("periodic-conservation", "conservation", INFINITY, 1e-10, "policy rollout diverged");
  double worst = 0.0;
  for (const physics::State1D* end : {&weno_end, &ep.trajectory.back()}) {
    for (std::size_t f = 0; f < u0.fields; ++f) {
      double s0 = 0.0, s1 = 0.0, scale = 0.0;
      for (std::size_t j = 0; j < u0.cells; ++j) {
        s0 += u0(f, j);
        s1 += (*end)(f, j);
        scale += std::fabs(u0(f, j));
      }
      worst = std::max(worst, std::fabs(s1 - s0) / scale);
    }
  }
  return make("periodic-conservation", "conservation", worst, 1e-10,
              fmt("max relative drift of a field sum after %g steps", static_cast<double>(steps)));
}

PropertyResult constant_fixed_point() {
  const auto spec = physics::EquationSpec::euler();
  physics::State1D u(3, 32, 1.0 / 32.0, 0.0);
  const auto U = physics::to_conserved({1.3, 0.4, 0.9}, spec.gamma);
  for (std::size_t j = 0; j < 32; ++j)
    for (std::size_t f = 0; f < 3; ++f) u(f, j) = U[f];
  std::size_t changed = 0;
  for (auto b : {physics::Boundary::outflow, physics::Boundary::periodic}) {
    weno::SolverOptions opt;
    opt.boundary = b;
    const auto w = weno::weno_solve_steps(u, spec, 20, 1e-3, opt).final_state();
    env::EpisodeConfig cfg;
    cfg.initial_state = u;
    cfg.boundary = b;
    cfg.steps = 20;
    const auto ep = env::run_episode(policy::init_params(4), cfg);
    for (std::size_t k = 0; k < u.q.size(); ++k) {
      changed += w.q[k] != u.q[k];
      changed += ep.trajectory.back().q[k] != u.q[k];
    }
  }
  return make("constant-fixed-point", "fixed-point", static_cast<double>(changed), 0.0,
              "cells changed after 20 steps (classical and policy, both boundaries)");
}

PropertyResult light_cone_scope() {
  const auto spec = physics::EquationSpec::euler();
  constexpr long kRadius = 2;  // one step reads cells c-2 .. c+2
  std::size_t leaks = 0, inside = 0, inside_nonzero = 0;
  const std::size_t cells = 16;
  for (int agent_kind = 0; agent_kind < 2; ++agent_kind) {
    env::EpisodeConfig cfg;
    cfg.initial_state = smooth_state(spec, cells, 23);
    cfg.steps = 3;
    cfg.dt = 2e-3;
    cfg.alpha_gradient = false;
    const env::Agent agent =
        agent_kind == 0 ? env::Agent(env::WenoOracle{}) : env::Agent(policy::init_params(8));
    const env::EpisodeResult res = env::run_episode(agent, cfg, env::TapeMode::full);
    const std::size_t ni = cells + 1;
    for (std::size_t t = 1; t <= cfg.steps; ++t) {
      for (std::size_t seed = 0; seed < res.state_ids[t].size(); ++seed) {
        const long c = static_cast<long>(seed % cells);
        const ad::GradientMap adj = res.tape->backward(res.state_ids[t][seed]);
        for (std::size_t s = 1; s <= t; ++s) {
          const long k = static_cast<long>(t - s + 1);
          const auto& ids = res.action_ids[s - 1];
          for (std::size_t a = 0; a < ids.size(); ++a) {
            const long i = static_cast<long>((a / 4) % ni);
            const bool in_cone = c - i >= -1 - kRadius * (k - 1) && c - i <= kRadius * (k - 1);
            const bool nonzero = adj[ids[a]] != 0.0;
            if (in_cone) {
              ++inside;
              inside_nonzero += nonzero;
            } else {
              leaks += nonzero;
            }
          }
        }
      }
    }
  }
  auto r = make("light-cone-scope", "scope", static_cast<double>(leaks), 0.0,
                fmt("nonzero adjoints outside the cone; %.0f of %.0f inside are nonzero",
                    static_cast<double>(inside_nonzero), static_cast<double>(inside)));
  r.passed = r.passed && inside_nonzero > 0;
  return r;
}

PropertyResult oracle_zero_return() {
  double worst = 0.0;
  for (const char* ic : {"sod", "sod2", "lax"}) {
    env::EpisodeConfig cfg = sod_config(64, 100);
    cfg.ic = ic;
    const auto ep = env::run_episode(env::WenoOracle{}, cfg);
    worst = std::max(worst, ep.diverged ? INFINITY : std::fabs(ep.total_return));
  }
  return make("oracle-zero-return", "reward", worst, 0.0, "|return| of the WENO-mimicking agent, N=64, 100 steps");
}

PropertyResult reward_upper_bound() {
  double best = -INFINITY;
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    const auto ep = env::run_episode(policy::init_params(seed), sod_config(64, 100));
    best = std::max(best, ep.total_return);
  }
  auto r = make("reward-upper-bound", "reward", best, 0.0, "largest return of three random policies (must be < 0)");
  r.passed = best < 0.0;
  return r;
}

PropertyResult additive_reward() {
  const env::EpisodeConfig cfg = sod_config(32, 20);
  const auto ep = env::run_episode(policy::init_params(2), cfg);
  double worst = 0.0;
  for (std::size_t t = 0; t < ep.rewards.steps(); ++t) {
    double sum = 0.0;
    for (double r : ep.rewards.per_interface[t]) sum += r;
    worst = std::max(worst, std::fabs(sum - ep.rewards.system[t]));
    const physics::State1D ref =
        weno::weno_step(ep.trajectory[t], cfg.spec, cfg.dt, cfg.solver_options(), t + 1);
    double err = 0.0;
    for (std::size_t k = 0; k < ref.q.size(); ++k) err += std::fabs(ep.trajectory[t + 1].q[k] - ref.q[k]);
    worst = std::max(worst, std::fabs(ep.rewards.system[t] + err) / std::max(err, 1e-300));
  }
  return make("additive-reward", "reward", worst, 1e-12,
              "system reward vs interface sum (absolute) and vs -sum_j e_j (relative)");
}

PropertyResult decentralized_actions() {
  const auto spec = physics::EquationSpec::euler();
  const policy::PolicyParams p = policy::init_params(6);
  const env::ObservationTensor obs = env::observe(smooth_state(spec, 32, 4), spec);
  const env::ActionTensor batch = env::act(p, obs);
  std::size_t mismatches = 0;
  for (std::size_t q = 0; q < obs.fields; ++q) {
    for (std::size_t i = 0; i < obs.interfaces; ++i) {
      for (std::size_t s = 0; s < 2; ++s) {
        const auto x = policy::prepare_input(p.input, obs(q, i, s, 0), obs(q, i, s, 1), obs(q, i, s, 2));
        const auto w = policy::policy_forward(p, {x, 1.0});
        mismatches += w[0] != batch(q, i, s, 0);
        mismatches += w[1] != batch(q, i, s, 1);
      }
    }
  }
  return make("decentralized-actions", "decentralization", static_cast<double>(mismatches), 0.0,
              "weights that differ between per-agent and batched evaluation");
}

PropertyResult linear_exactness(const CandidateFn& candidates) {
  std::mt19937_64 rng(31);
  double worst = 0.0;
  for (int n = 0; n < 1000; ++n) {
    const double a = 4.0 * unit(rng) - 2.0, b = 4.0 * unit(rng) - 2.0;
    const double s0 = a, s1 = a + b, s2 = a + 2.0 * b;
    const double exact = a + 1.5 * b;  // value at the face between s1 and s2
    const double scale = std::fabs(a) + std::fabs(b) + 1.0;
    const auto c = candidates(s0, s1, s2);
    const double w0 = unit(rng);
    const double mixed = weno::combine(c, weno::Pair<double>{w0, 1.0 - w0});
    worst = std::max({worst, std::fabs(c[0] - exact) / scale, std::fabs(c[1] - exact) / scale,
                      std::fabs(mixed - exact) / scale});
  }
  return make("linear-exactness", "reconstruction", worst, 1e-12, "max scaled error on 1000 linear stencils");
}

PropertyResult linear_exactness() {
  return linear_exactness([](double s0, double s1, double s2) { return weno::candidates(s0, s1, s2); });
}

PropertyResult constant_consistency() {
  std::mt19937_64 rng(37);
  double worst = 0.0;
  for (int n = 0; n < 1000; ++n) {
    const double v = (2.0 * unit(rng) - 1.0) * 100.0;
    const double w0 = unit(rng);
    const double r = weno::reconstruct(v, v, v, weno::Pair<double>{w0, 1.0 - w0});
    const auto ww = weno::weno_weights(v, v, v, weno::WenoCoefficients{});
    const double rw = weno::reconstruct(v, v, v, ww);
    worst = std::max({worst, std::fabs(r - v) / std::max(1.0, std::fabs(v)), std::fabs(rw - v) / std::max(1.0, std::fabs(v))});
  }
  return make("constant-consistency", "reconstruction", worst, 1e-12, "max relative error on constant stencils");
}

PropertyResult y_uniform_2d_matches_1d(const env::Agent& agent, const std::string& ic, std::size_t nx,
                                       std::size_t ny, double t_final, double dt) {
  env::Config2D c2;
  c2.ic = ic;
  c2.nx = nx;
  c2.ny = ny;
  c2.dt = dt;
  c2.t_final = t_final;
  c2.boundary = physics::Boundary::outflow;
  const env::State2D end2 = env::solve_2d(agent, c2).snapshots.back();

  const auto spec = physics::EquationSpec::euler(c2.gamma);
  const physics::Grid1D grid = physics::make_grid(nx, c2.problem);
  const physics::State1D u0 = physics::initial_condition(ic, grid, spec, c2.problem);
  weno::SolverOptions opt;
  opt.boundary = physics::Boundary::outflow;
  const physics::State1D end1 = training::agent_rollout(agent, u0, spec, t_final, dt, opt);

  constexpr std::size_t kMap[3] = {0, 1, 3};  // 1D field -> 2D field
  double worst = 0.0;
  for (std::size_t j = 0; j < ny; ++j) {
    for (std::size_t i = 0; i < nx; ++i) {
      for (std::size_t f = 0; f < 3; ++f) worst = std::max(worst, std::fabs(end2(kMap[f], i, j) - end1(f, i)));
      worst = std::max(worst, std::fabs(end2(2, i, j)));
    }
  }
  return make("y-uniform-2d-vs-1d", "dimension", worst, 1e-10,
              std::string(std::holds_alternative<env::WenoOracle>(agent) ? "WENO" : "policy") +
                  fmt(", max |2D - 1D| over every row, %g x %g cells", static_cast<double>(nx), static_cast<double>(ny)));
}

std::vector<std::string> suite_groups() {
  return {"grad", "tape", "simplex", "conservation", "fixed-point", "scope", "reward", "decentralization", "reconstruction",
          "dimension"};
}

std::vector<PropertyResult> run_suite(const SuiteOptions& opt) {
  auto wanted = [&](const std::string& g) {
    return opt.only.empty() || std::find(opt.only.begin(), opt.only.end(), g) != opt.only.end();
  };
  std::vector<PropertyResult> out;
  if (wanted("reconstruction")) {
    if (opt.fault == Fault::candidate_sign) {
      out.push_back(linear_exactness([](double s0, double s1, double s2) {
        auto c = weno::candidates(s0, s1, s2);
        c[0] += 2.0 * 0.5 * s0;  // -1/2 s0 becomes +1/2 s0
        return c;
      }));
    } else {
      out.push_back(linear_exactness());
    }
    out.push_back(constant_consistency());
  }
  if (wanted("simplex")) out.push_back(action_simplex());
  if (wanted("fixed-point")) out.push_back(constant_fixed_point());
  if (wanted("conservation")) out.push_back(periodic_conservation());
  if (wanted("decentralization")) out.push_back(decentralized_actions());
  if (wanted("reward")) {
    out.push_back(oracle_zero_return());
    out.push_back(reward_upper_bound());
    out.push_back(additive_reward());
  }
  if (wanted("scope")) out.push_back(light_cone_scope());
  if (wanted("grad")) {
    out.push_back(step_gradient());
    out.push_back(gradient_vs_finite_differences());
  }
  if (wanted("tape")) out.push_back(block_vs_full_tape());
  if (wanted("dimension")) {
    out.push_back(y_uniform_2d_matches_1d(env::WenoOracle{}));
    out.push_back(y_uniform_2d_matches_1d(policy::init_params(3)));
  }
  return out;
}

}  // namespace decmdp::verify

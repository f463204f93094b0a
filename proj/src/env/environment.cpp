#include "decmdp/env/environment.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "decmdp/autodiff/var.hpp"
#include "decmdp/errors.hpp"
#include "decmdp/physics/euler.hpp"
#include "decmdp/physics/initial_conditions.hpp"
#include "decmdp/simd/kernels.hpp"
#include "decmdp/weno/split.hpp"

namespace decmdp::env {

using ad::Var;
using weno::Pair;

std::string_view reward_name(RewardKind kind) {
  switch (kind) {
    case RewardKind::rl_weno: return "rl-weno";
    case RewardKind::bc_weno: return "bc-weno";
    case RewardKind::bc_analytical: return "bc-analytical";
  }
  return "?";
}

RewardKind reward_from_name(std::string_view name) {
  if (name == "rl-weno") return RewardKind::rl_weno;
  if (name == "bc-weno") return RewardKind::bc_weno;
  if (name == "bc-analytical") return RewardKind::bc_analytical;
  throw ConfigError("unknown reward kind '" + std::string(name) + "'");
}

// ---------------------------------------------------------------------------

void ActionTensor::validate() const {
  if (weights.size() != fields * interfaces * 4) throw ConfigError("action tensor has the wrong size");
  for (std::size_t k = 0; k < weights.size(); k += 2) {
    const double a = weights[k];
    const double b = weights[k + 1];
    if (!(a >= 0.0 && a <= 1.0 && b >= 0.0 && b <= 1.0) || std::fabs(a + b - 1.0) > kSimplexTolerance) {
      throw ConfigError("action " + std::to_string(k / 2) + " violates the simplex constraint");
    }
  }
}

ObservationTensor observe(const State1D& u, const physics::EquationSpec& spec, physics::Boundary boundary) {
  const double alpha = weno::splitting_alpha(u, spec);
  const auto split = weno::split_state<double>(u, spec, boundary, alpha);
  ObservationTensor obs;
  obs.fields = u.fields;
  obs.interfaces = split.interfaces();
  obs.alpha = alpha;
  obs.values.resize(obs.agents() * 3);
  std::size_t n = 0;
  for (std::size_t q = 0; q < obs.fields; ++q) {
    for (std::size_t i = 0; i < obs.interfaces; ++i) {
      for (std::size_t s = 0; s < 2; ++s) {
        for (std::size_t k = 0; k < 3; ++k) obs.values[n++] = split.stencil(q, i, s, k);
      }
    }
  }
  // Joint observability: the interior state follows from the stencils.
  const std::vector<double> back = reconstruct_state(obs);
  for (std::size_t q = 0; q < u.fields; ++q) {
    for (std::size_t j = 0; j < u.cells; ++j) {
      const double scale = (std::fabs(obs(q, j, 0, 2)) + std::fabs(obs(q, j, 1, 1))) / alpha + std::fabs(u(q, j));
      if (std::fabs(back[q * u.cells + j] - u(q, j)) > 1e-12 * scale + 1e-300) {
        throw NumericalError("observation does not determine cell " + std::to_string(j));
      }
    }
  }
  return obs;
}

std::vector<double> reconstruct_state(const ObservationTensor& obs) {
  const std::size_t cells = obs.interfaces - 1;
  std::vector<double> u(obs.fields * cells);
  // Cell j is the last plus point and the middle minus point of interface j.
  for (std::size_t q = 0; q < obs.fields; ++q) {
    for (std::size_t j = 0; j < cells; ++j) u[q * cells + j] = (obs(q, j, 0, 2) - obs(q, j, 1, 1)) / obs.alpha;
  }
  return u;
}

std::vector<double> apply_actions(const ObservationTensor& obs, const ActionTensor& actions) {
  if (actions.fields != obs.fields || actions.interfaces != obs.interfaces) {
    throw ConfigError("action tensor does not match the observation");
  }
  actions.validate();
  std::vector<double> flux(obs.fields * obs.interfaces);
  for (std::size_t q = 0; q < obs.fields; ++q) {
    for (std::size_t i = 0; i < obs.interfaces; ++i) {
      const double plus = weno::reconstruct(obs(q, i, 0, 0), obs(q, i, 0, 1), obs(q, i, 0, 2),
                                            Pair<double>{actions(q, i, 0, 0), actions(q, i, 0, 1)});
      const double minus = weno::reconstruct(obs(q, i, 1, 0), obs(q, i, 1, 1), obs(q, i, 1, 2),
                                             Pair<double>{actions(q, i, 1, 0), actions(q, i, 1, 1)});
      flux[q * obs.interfaces + i] = plus + minus;
    }
  }
  return flux;
}

State1D transition(const State1D& u, std::span<const double> fluxes, double dt, const physics::EquationSpec& spec,
                   std::size_t step) {
  if (fluxes.size() != u.fields * (u.cells + 1)) throw ConfigError("transition: flux array has the wrong size");
  State1D next = weno::conservative_update<double>(u, fluxes, dt);
  if (!physics::admissible(next, spec)) throw BlowUpError(step, "inadmissible state after transition");
  return next;
}

ActionTensor act(const Agent& agent, const ObservationTensor& obs) {
  ActionTensor a;
  a.fields = obs.fields;
  a.interfaces = obs.interfaces;
  a.weights.resize(obs.agents() * 2);
  if (const auto* oracle = std::get_if<WenoOracle>(&agent)) {
    for (std::size_t b = 0; b < obs.agents(); ++b) {
      const double* s = obs.values.data() + 3 * b;
      const auto w = weno::weno_weights(s[0], s[1], s[2], oracle->coeffs);
      a.weights[2 * b] = w[0];
      a.weights[2 * b + 1] = w[1];
    }
  } else {
    policy::policy_forward_batch(std::get<policy::PolicyParams>(agent), obs.values, a.weights);
  }
  return a;
}

// ---------------------------------------------------------------------------
// Rewards

namespace {

// Shared by the plain and taped routes so both sum in the same order.
template <class T, class Diff>
std::vector<T> interface_rewards_generic(std::size_t fields, std::size_t cells, Diff&& diff) {
  std::vector<T> e(cells);
  for (std::size_t j = 0; j < cells; ++j) {
    T acc = math::abs(diff(0, j));
    for (std::size_t q = 1; q < fields; ++q) acc = acc + math::abs(diff(q, j));
    e[j] = acc;
  }
  std::vector<T> r(cells + 1);
  r[0] = -0.5 * e[0];
  for (std::size_t i = 1; i < cells; ++i) r[i] = -0.5 * (e[i - 1] + e[i]);
  r[cells] = -0.5 * e[cells - 1];
  return r;
}

template <class T>
T sum_in_order(const std::vector<T>& v) {
  T acc = v[0];
  for (std::size_t k = 1; k < v.size(); ++k) acc = acc + v[k];
  return acc;
}

}  // namespace

std::vector<double> interface_rewards(const State1D& next, const State1D& ref) {
  if (next.fields != ref.fields || next.cells != ref.cells) throw ConfigError("reward: states are on different grids");
  return interface_rewards_generic<double>(next.fields, next.cells,
                                           [&](std::size_t q, std::size_t j) { return next(q, j) - ref(q, j); });
}

std::vector<double> reward_rl_weno(const State1D& prev, const State1D& next, const physics::EquationSpec& spec,
                                   double dt, const weno::SolverOptions& opt) {
  return interface_rewards(next, weno::weno_step(prev, spec, dt, opt));
}

std::vector<double> reward_bc(const State1D& next, const std::vector<State1D>& reference, std::size_t t) {
  if (t >= reference.size()) throw ConfigError("reference trajectory is shorter than the episode");
  return interface_rewards(next, reference[t]);
}

// ---------------------------------------------------------------------------
// Episodes

namespace {

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::string chosen_ic(const EpisodeConfig& cfg) {
  const auto names = split_list(cfg.ic);
  if (names.empty()) throw ConfigError("no initial condition given");
  return names[cfg.seed % names.size()];
}

State1D values_of(const physics::ConservedState<Var>& u) {
  State1D out = u.same_grid<double>();
  for (std::size_t k = 0; k < u.q.size(); ++k) out.q[k] = u.q[k].value();
  return out;
}

// Splitting speed as a tape value: the classical alpha recomputed at the
// first cell attaining the maximum, so the adjoint follows that cell.
Var taped_alpha(ad::Tape& tape, const physics::ConservedState<Var>& u, const State1D& uv,
                const physics::EquationSpec& spec, double alpha) {
  for (std::size_t j = 0; j < uv.cells; ++j) {
    if (spec.kind == physics::EquationKind::burgers1d) {
      if (std::fabs(uv(0, j)) == alpha) return math::abs(u(0, j));
    } else if (physics::euler_wave_speed(uv(0, j), uv(1, j), uv(2, j), spec.gamma) == alpha) {
      return physics::euler_wave_speed(u(0, j), u(1, j), u(2, j), spec.gamma);
    }
  }
  return Var::constant(tape, alpha);  // floored value
}

}  // namespace

void EpisodeConfig::validate() const {
  spec.validate();
  if (spec.kind == physics::EquationKind::euler2d) throw ConfigError("episodes are one-dimensional");
  if (steps < 1) throw ConfigError("an episode needs at least one step");
  if (!(dt > 0.0)) throw ConfigError("time step must be positive");
  if (!initial_state) {
    for (const auto& name : split_list(ic)) {
      physics::initial_condition(name, physics::make_grid(cells, problem), spec, problem);
    }
  }
  const State1D u0 = initial();
  if (u0.cells < physics::kMinCells) throw ConfigError("too few cells for the stencil");
  weno::check_cfl(dt, weno::splitting_alpha(u0, spec), u0.dx);
  if (reward == RewardKind::bc_analytical && initial_state) {
    throw ConfigError("bc-analytical needs a named Riemann initial condition");
  }
}

State1D EpisodeConfig::initial() const {
  if (initial_state) {
    if (initial_state->fields != spec.fields()) throw ConfigError("initial state does not match the equation");
    return *initial_state;
  }
  return physics::initial_condition(chosen_ic(*this), physics::make_grid(cells, problem), spec, problem);
}

weno::SolverOptions EpisodeConfig::solver_options() const {
  weno::SolverOptions opt;
  opt.boundary = boundary;
  opt.coeffs = coeffs;
  return opt;
}

std::vector<State1D> reference_trajectory(const EpisodeConfig& cfg) {
  const State1D u0 = cfg.initial();
  if (cfg.reward == RewardKind::bc_analytical) {
    if (cfg.initial_state) throw ConfigError("bc-analytical needs a named Riemann initial condition");
    const std::string ic = chosen_ic(cfg);
    const auto grid = physics::make_grid(cfg.cells, cfg.problem);
    std::vector<State1D> out;
    out.reserve(cfg.steps + 1);
    for (std::size_t t = 0; t <= cfg.steps; ++t) {
      out.push_back(physics::exact_solution(ic, grid, cfg.spec, static_cast<double>(t) * cfg.dt, cfg.problem));
    }
    return out;
  }
  return weno::weno_solve_steps(u0, cfg.spec, cfg.steps, cfg.dt, cfg.solver_options(), 1).snapshots;
}

namespace {

void record_rewards(EpisodeResult& res, std::vector<double> r) {
  res.rewards.system.push_back(sum_in_order(r));
  res.rewards.per_interface.push_back(std::move(r));
}

void mark_diverged(EpisodeResult& res, std::size_t step, const std::string& why) {
  res.diverged = true;
  res.diverged_step = step;
  res.divergence_reason = why;
  res.total_return = kDivergedReturn;
}

void run_plain(const Agent& agent, const EpisodeConfig& cfg, const std::vector<State1D>* reference,
               EpisodeResult& res) {
  const weno::SolverOptions opt = cfg.solver_options();
  State1D u = res.trajectory.front();
  for (std::size_t t = 1; t <= cfg.steps; ++t) {
    try {
      const ObservationTensor obs = observe(u, cfg.spec, cfg.boundary);
      weno::check_cfl(cfg.dt, obs.alpha, u.dx);
      const ActionTensor a = act(agent, obs);
      State1D next = transition(u, apply_actions(obs, a), cfg.dt, cfg.spec, t);
      std::vector<double> r = cfg.reward == RewardKind::rl_weno ? reward_rl_weno(u, next, cfg.spec, cfg.dt, opt)
                                                               : reward_bc(next, *reference, t);
      record_rewards(res, std::move(r));
      res.partial_return = t == 1 ? res.rewards.system.back() : res.partial_return + res.rewards.system.back();
      res.trajectory.push_back(next);
      u = std::move(next);
    } catch (const std::exception& e) {
      if (dynamic_cast<const BlowUpError*>(&e) == nullptr && dynamic_cast<const NumericalError*>(&e) == nullptr &&
          dynamic_cast<const ConfigError*>(&e) == nullptr) {
        throw;
      }
      mark_diverged(res, t, e.what());
      return;
    }
  }
  res.total_return = res.partial_return;
}

// Taped rollout. Values are computed with the same operations as run_plain.
class TapedRollout {
 public:
  TapedRollout(const Agent& agent, const EpisodeConfig& cfg, TapeMode mode, const std::vector<State1D>* reference,
               EpisodeResult& res)
      : agent_(agent), cfg_(cfg), mode_(mode), reference_(reference), res_(res), tape_(*res.tape) {}

  void run() {
    const auto* params = std::get_if<policy::PolicyParams>(&agent_);
    if (params != nullptr) params->validate();
    if (mode_ == TapeMode::full && params != nullptr) {
      for (double v : params->values) {
        const Var p = Var::leaf(tape_, v);
        param_vars_.push_back(p);
        res_.param_leaves.push_back(p.id());
      }
    }
    const State1D& u0 = res_.trajectory.front();
    physics::ConservedState<Var> u = u0.same_grid<Var>();
    for (std::size_t k = 0; k < u0.q.size(); ++k) u.q[k] = Var::leaf(tape_, u0.q[k]);
    res_.state_ids.push_back(ids_of(u.q));

    Var total;
    for (std::size_t t = 1; t <= cfg_.steps; ++t) {
      try {
        const State1D uv = values_of(u);
        const double alpha = weno::splitting_alpha(uv, cfg_.spec);
        weno::check_cfl(cfg_.dt, alpha, uv.dx);
        const auto split =
            cfg_.alpha_gradient
                ? weno::split_state(u, cfg_.spec, cfg_.boundary, taped_alpha(tape_, u, uv, cfg_.spec, alpha))
                : weno::split_state(u, cfg_.spec, cfg_.boundary, alpha);
        const std::vector<Var> w = weights(split, t);
        res_.action_ids.push_back(ids_of(w));
        const std::size_t ni = split.interfaces();
        std::vector<Var> flux(u.fields * ni);
        for (std::size_t q = 0; q < u.fields; ++q) {
          for (std::size_t i = 0; i < ni; ++i) {
            const std::size_t b = (q * ni + i) * 2;
            flux[q * ni + i] = weno::interface_flux(split, q, i, Pair<Var>{w[2 * b], w[2 * b + 1]},
                                                    Pair<Var>{w[2 * b + 2], w[2 * b + 3]});
          }
        }
        physics::ConservedState<Var> next = weno::conservative_update<Var>(u, flux, cfg_.dt);
        State1D nv = values_of(next);
        if (!physics::admissible(nv, cfg_.spec)) throw BlowUpError(t, "inadmissible state after transition");

        std::vector<Var> r;
        if (cfg_.reward == RewardKind::rl_weno) {
          const std::vector<Var> ref_flux = weno::weno_interface_fluxes_generic(split, cfg_.coeffs);
          const physics::ConservedState<Var> ref = weno::conservative_update<Var>(u, ref_flux, cfg_.dt);
          r = interface_rewards_generic<Var>(u.fields, u.cells,
                                             [&](std::size_t q, std::size_t j) { return next(q, j) - ref(q, j); });
        } else {
          if (t >= reference_->size()) throw ConfigError("reference trajectory is shorter than the episode");
          const State1D& ref = (*reference_)[t];
          r = interface_rewards_generic<Var>(u.fields, u.cells,
                                             [&](std::size_t q, std::size_t j) { return next(q, j) - ref(q, j); });
        }
        const Var rt = sum_in_order(r);
        std::vector<double> rv(r.size());
        for (std::size_t k = 0; k < r.size(); ++k) rv[k] = r[k].value();
        record_rewards(res_, std::move(rv));
        total = t == 1 ? rt : total + rt;
        res_.return_node = total.id();
        res_.has_return_node = true;
        res_.partial_return = total.value();
        res_.trajectory.push_back(std::move(nv));
        res_.state_ids.push_back(ids_of(next.q));
        u = std::move(next);
      } catch (const std::exception& e) {
        if (dynamic_cast<const BlowUpError*>(&e) == nullptr && dynamic_cast<const NumericalError*>(&e) == nullptr &&
            dynamic_cast<const ConfigError*>(&e) == nullptr &&
            dynamic_cast<const ad::NonFiniteValue*>(&e) == nullptr) {
          throw;
        }
        mark_diverged(res_, t, e.what());
        return;
      }
    }
    res_.total_return = res_.partial_return;
  }

 private:
  // Weights for every (field, interface, sign), 2 per agent.
  std::vector<Var> weights(const weno::SplitFluxField<Var>& split, std::size_t step) {
    const std::size_t ni = split.interfaces();
    const std::size_t batch = split.fields * ni * 2;
    std::vector<Var> w(batch * 2);
    if (const auto* oracle = std::get_if<WenoOracle>(&agent_)) {
      for_each_stencil(split, [&](std::size_t b, const Var& s0, const Var& s1, const Var& s2) {
        const auto ww = weno::weno_weights(s0, s1, s2, oracle->coeffs);
        w[2 * b] = ww[0];
        w[2 * b + 1] = ww[1];
      });
      return w;
    }
    const auto& params = std::get<policy::PolicyParams>(agent_);
    auto input = [&](const Var& s0, const Var& s1, const Var& s2) -> std::array<Var, 3> {
      return policy::prepare_input(params.input, s0, s1, s2);
    };
    if (mode_ == TapeMode::full) {
      for_each_stencil(split, [&](std::size_t b, const Var& s0, const Var& s1, const Var& s2) {
        const auto x = input(s0, s1, s2);
        const auto ww = policy::forward_item<Var>(param_vars_.data(), x.data());
        w[2 * b] = ww[0];
        w[2 * b + 1] = ww[1];
      });
      return w;
    }
    PolicyBlock block;
    block.step = step;
    block.batch = batch;
    block.input_ids.resize(batch * 3);
    block.inputs.resize(batch * 3);
    for_each_stencil(split, [&](std::size_t b, const Var& s0, const Var& s1, const Var& s2) {
      const auto x = input(s0, s1, s2);
      for (std::size_t k = 0; k < 3; ++k) {
        block.input_ids[3 * b + k] = x[k].id();
        block.inputs[3 * b + k] = x[k].value();
      }
    });
    std::vector<double> out(batch * 2);
    simd::MlpForwardArgs args;
    args.params = params.values.data();
    args.inputs = block.inputs.data();
    args.batch = batch;
    args.outputs = out.data();
    simd::mlp_forward(args);
    for (std::size_t k = 0; k < out.size(); ++k) {
      w[k] = Var::leaf(tape_, out[k]);
      if (k == 0) block.first_action = w[k].id();
    }
    res_.blocks.push_back(std::move(block));
    return w;
  }

  static std::vector<ad::NodeId> ids_of(const std::vector<Var>& v) {
    std::vector<ad::NodeId> out(v.size());
    for (std::size_t k = 0; k < v.size(); ++k) out[k] = v[k].id();
    return out;
  }

  template <class F>
  static void for_each_stencil(const weno::SplitFluxField<Var>& split, F&& f) {
    const std::size_t ni = split.interfaces();
    std::size_t b = 0;
    for (std::size_t q = 0; q < split.fields; ++q) {
      for (std::size_t i = 0; i < ni; ++i) {
        for (std::size_t s = 0; s < 2; ++s, ++b) {
          f(b, split.stencil(q, i, s, 0), split.stencil(q, i, s, 1), split.stencil(q, i, s, 2));
        }
      }
    }
  }

  const Agent& agent_;
  const EpisodeConfig& cfg_;
  TapeMode mode_;
  const std::vector<State1D>* reference_;
  EpisodeResult& res_;
  ad::Tape& tape_;
  std::vector<Var> param_vars_;
};

}  // namespace

namespace {

thread_local std::unique_ptr<ad::Tape> spare_tape;

}  // namespace

void recycle_tape(EpisodeResult& result) {
  if (!result.tape) return;
  result.tape->clear();
  result.has_return_node = false;
  spare_tape = std::move(result.tape);
}

EpisodeResult run_episode(const Agent& agent, const EpisodeConfig& cfg, TapeMode mode) {
  cfg.validate();
  EpisodeResult res;
  res.trajectory.push_back(cfg.initial());
  res.rewards.interfaces = res.trajectory.front().cells + 1;
  std::vector<State1D> reference;
  if (cfg.reward != RewardKind::rl_weno) reference = reference_trajectory(cfg);

  if (mode == TapeMode::off) {
    run_plain(agent, cfg, &reference, res);
    return res;
  }
  if (spare_tape) {
    res.tape = std::move(spare_tape);
    res.tape->set_mode(ad::Tape::Mode::unchecked);
  } else {
    res.tape = std::make_unique<ad::Tape>(ad::Tape::Mode::unchecked);
  }
  TapedRollout(agent, cfg, mode, &reference, res).run();
  return res;
}

void write_episode_summary(const EpisodeResult& result, const EpisodeConfig& cfg, const std::string& path) {
  io::KeyValue kv;
  kv.set("equation", std::string(physics::equation_name(cfg.spec.kind)));
  kv.set("ic", cfg.initial_state ? std::string("custom") : chosen_ic(cfg));
  kv.set("cells", std::to_string(result.trajectory.front().cells));
  kv.set("dt", io::format_exact(cfg.dt));
  kv.set("steps", std::to_string(cfg.steps));
  kv.set("reward", std::string(reward_name(cfg.reward)));
  kv.set("return", io::format_exact(result.total_return));
  kv.set("partial_return", io::format_exact(result.partial_return));
  kv.set("diverged", result.diverged ? "true" : "false");
  if (result.diverged) kv.set("diverged_step", std::to_string(result.diverged_step));
  std::string series;
  for (std::size_t t = 0; t < result.rewards.system.size(); ++t) {
    if (t) series += ' ';
    series += io::format_exact(result.rewards.system[t]);
  }
  kv.set("step_rewards", series);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path);
  out << kv.to_string();
}

}  // namespace decmdp::env

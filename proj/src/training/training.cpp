#include "decmdp/training/training.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>
#include <fstream>

#include "decmdp/errors.hpp"
#include "decmdp/log.hpp"
#include "decmdp/physics/initial_conditions.hpp"
#include "decmdp/simd/kernels.hpp"

namespace decmdp::training {

using physics::State1D;

double clip_global_norm(std::span<double> g, double clip, bool* clipped) {
  double sq = 0.0;
  for (double v : g) sq += v * v;
  const double norm = std::sqrt(sq);
  const bool apply = clip > 0.0 && norm > clip;
  if (apply) {
    const double scale = clip / norm;
    for (double& v : g) v *= scale;
  }
  if (clipped != nullptr) *clipped = apply;
  return norm;
}

GradientResult bptts_gradient(const policy::PolicyParams& params, const env::EpisodeConfig& cfg, double clip) {
  env::EpisodeResult ep = env::run_episode(params, cfg, env::TapeMode::block);
  GradientResult out;
  out.episode_return = ep.total_return;
  out.partial_return = ep.partial_return;
  out.diverged = ep.diverged;
  out.gradient.assign(policy::kParamCount, 0.0);
  if (!ep.has_return_node) return out;

  const ad::Tape& tape = *ep.tape;
  thread_local std::vector<double> adj;
  adj.assign(tape.size(), 0.0);
  adj[ep.return_node] = 1.0;
  ad::NodeId hi = ep.return_node + 1;
  std::vector<double> upstream;
  std::vector<double> input_grad;
  for (auto it = ep.blocks.rbegin(); it != ep.blocks.rend(); ++it) {
    const env::PolicyBlock& b = *it;
    if (b.first_action >= hi) continue;  // after the differentiated return
    const ad::NodeId end = b.first_action + static_cast<ad::NodeId>(2 * b.batch);
    tape.sweep(adj, hi, end);
    upstream.assign(adj.begin() + b.first_action, adj.begin() + end);
    input_grad.assign(3 * b.batch, 0.0);
    simd::MlpBackwardArgs args;
    args.params = params.values.data();
    args.inputs = b.inputs.data();
    args.upstream = upstream.data();
    args.batch = b.batch;
    args.param_grad = out.gradient.data();
    args.input_grad = input_grad.data();
    simd::mlp_backward(args);
    for (std::size_t k = 0; k < input_grad.size(); ++k) adj[b.input_ids[k]] += input_grad[k];
    hi = b.first_action;
  }
  env::recycle_tape(ep);
  out.norm = clip_global_norm(out.gradient, clip, &out.clipped);
  return out;
}

GradientResult full_tape_gradient(const policy::PolicyParams& params, const env::EpisodeConfig& cfg) {
  env::EpisodeResult ep = env::run_episode(params, cfg, env::TapeMode::full);
  GradientResult out;
  out.episode_return = ep.total_return;
  out.partial_return = ep.partial_return;
  out.diverged = ep.diverged;
  out.gradient.assign(policy::kParamCount, 0.0);
  if (!ep.has_return_node) return out;
  const ad::GradientMap g = ep.tape->backward(ep.return_node);
  for (std::size_t k = 0; k < ep.param_leaves.size(); ++k) out.gradient[k] = g[ep.param_leaves[k]];
  out.norm = clip_global_norm(out.gradient, 0.0);
  return out;
}

void adam_step(std::span<double> params, std::span<const double> grads, AdamState& st, const AdamHyper& h) {
  if (grads.size() != params.size() || st.m.size() != params.size() || st.v.size() != params.size()) {
    throw ConfigError("adam_step: shape mismatch");
  }
  ++st.step;
  const double t = static_cast<double>(st.step);
  const double c1 = 1.0 - std::pow(h.beta1, t);
  const double c2 = 1.0 - std::pow(h.beta2, t);
  for (std::size_t k = 0; k < params.size(); ++k) {
    const double g = grads[k];
    st.m[k] = h.beta1 * st.m[k] + (1.0 - h.beta1) * g;
    st.v[k] = h.beta2 * st.v[k] + (1.0 - h.beta2) * g * g;
    const double mhat = st.m[k] / c1;
    const double vhat = st.v[k] / c2;
    params[k] += h.lr * mhat / (std::sqrt(vhat) + h.eps);
  }
}

// ---------------------------------------------------------------------------

void TrainConfig::validate() const {
  if (episodes < 1) throw ConfigError("training needs at least one episode");
  if (!(adam.lr > 0.0)) throw ConfigError("learning rate must be positive");
  if (!(adam.beta1 >= 0.0 && adam.beta1 < 1.0 && adam.beta2 >= 0.0 && adam.beta2 < 1.0)) {
    throw ConfigError("Adam betas must lie in [0, 1)");
  }
  if (!(adam.eps > 0.0)) throw ConfigError("Adam epsilon must be positive");
  if (!(lr_final_factor > 0.0)) throw ConfigError("lr_final_factor must be positive");
  episode.validate();
}

io::KeyValue TrainConfig::to_keyvalue() const {
  io::KeyValue kv;
  kv.set("equation", std::string(physics::equation_name(episode.spec.kind)));
  kv.set("gamma", io::format_exact(episode.spec.gamma));
  kv.set("ic", episode.ic);
  kv.set("cells", std::to_string(episode.cells));
  kv.set("dt", io::format_exact(episode.dt));
  kv.set("steps", std::to_string(episode.steps));
  kv.set("boundary", std::string(physics::boundary_name(episode.boundary)));
  kv.set("reward", std::string(env::reward_name(episode.reward)));
  kv.set("weno.eps", io::format_exact(episode.coeffs.eps));
  kv.set("episodes", std::to_string(episodes));
  kv.set("lr", io::format_exact(adam.lr));
  kv.set("lr_final_factor", io::format_exact(lr_final_factor));
  kv.set("adam.beta1", io::format_exact(adam.beta1));
  kv.set("adam.beta2", io::format_exact(adam.beta2));
  kv.set("adam.eps", io::format_exact(adam.eps));
  kv.set("clip", io::format_exact(clip));
  kv.set("checkpoint_every", std::to_string(checkpoint_every));
  kv.set("seed", std::to_string(seed));
  kv.set("normalize", std::string(policy::input_mode_name(input)));
  return kv;
}

namespace {

// Per-episode stream derived from the run seed (splitmix64 finalizer).
std::uint64_t mix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

TrainResult train(const TrainConfig& cfg, const TrainHooks& hooks) {
  cfg.validate();
  TrainResult res;
  res.checkpoint.params = policy::init_params(cfg.seed, cfg.input);
  res.checkpoint.config_echo = cfg.to_keyvalue();
  policy::PolicyParams& params = res.checkpoint.params;
  AdamState adam(params.values.size());
  std::deque<bool> window;
  std::size_t window_diverged = 0;
  const double n = static_cast<double>(cfg.episodes);

  for (std::size_t e = 1; e <= cfg.episodes; ++e) {
    env::EpisodeConfig ec = cfg.episode;
    ec.seed = mix(cfg.seed ^ mix(e));
    const GradientResult g = bptts_gradient(params, ec, cfg.clip);

    AdamHyper hyper = cfg.adam;
    if (cfg.lr_final_factor != 1.0 && cfg.episodes > 1) {
      const double frac = static_cast<double>(e - 1) / (n - 1.0);
      hyper.lr = cfg.adam.lr * (1.0 + (cfg.lr_final_factor - 1.0) * frac);
    }
    adam_step(params.values, g.gradient, adam, hyper);

    LogRow row{e, g.episode_return, g.norm, g.clipped, g.diverged};
    res.curve.push_back(g.episode_return);
    res.log.push_back(row);
    if (g.clipped) log::info("episode " + std::to_string(e) + ": gradient clipped from norm " + std::to_string(g.norm));
    if (hooks.on_episode) hooks.on_episode(row);

    window.push_back(g.diverged);
    window_diverged += g.diverged ? 1 : 0;
    if (window.size() > kDivergenceWindow) {
      window_diverged -= window.front() ? 1 : 0;
      window.pop_front();
    }
    if (window.size() >= kDivergenceMinEpisodes && 2 * window_diverged > window.size()) {
      throw TrainingDiverged(e, std::to_string(window_diverged) + " of the last " + std::to_string(window.size()) +
                                    " episodes diverged (episode " + std::to_string(e) + ")");
    }
    if (cfg.checkpoint_every != 0 && e % cfg.checkpoint_every == 0 && e != cfg.episodes && hooks.on_checkpoint) {
      hooks.on_checkpoint(e, res.checkpoint);
    }
  }
  if (hooks.on_checkpoint) hooks.on_checkpoint(cfg.episodes, res.checkpoint);
  return res;
}

void write_log_csv(const std::vector<LogRow>& log, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << "episode,return,grad_norm,clipped,diverged\n";
  for (const LogRow& r : log) {
    out << r.episode << ',' << io::format_exact(r.episode_return) << ',' << io::format_exact(r.grad_norm) << ','
        << (r.clipped ? 1 : 0) << ',' << (r.diverged ? 1 : 0) << '\n';
  }
}

// ---------------------------------------------------------------------------
// Evaluation

L2Metric L2Metric::from_config(const io::KeyValue& cfg) {
  L2Metric m;
  m.field = static_cast<std::size_t>(cfg.get_int("eval.l2.field", 0));
  m.calibration = cfg.get_double("eval.l2.calibration", 1.0);
  return m;
}

double L2Metric::operator()(const State1D& a, const State1D& b) const {
  if (a.cells != b.cells || a.fields != b.fields) throw ConfigError("L2: states are on different grids");
  if (field >= a.fields) throw ConfigError("L2: field index out of range");
  double s = 0.0;
  for (std::size_t j = 0; j < a.cells; ++j) {
    const double d = a(field, j) - b(field, j);
    s += d * d * a.dx;
  }
  return std::sqrt(s) * calibration;
}

std::string L2Metric::describe() const {
  return "sqrt(sum_j (q" + std::to_string(field) + "_j - ref_j)^2 dx) * " + io::format_exact(calibration);
}

State1D agent_rollout(const env::Agent& agent, const State1D& u0, const physics::EquationSpec& spec, double t_final,
                      double dt, const weno::SolverOptions& opt, double* max_action_deviation) {
  const std::size_t steps = weno::steps_for(t_final, dt);
  const env::WenoOracle oracle{opt.coeffs};
  const bool track = max_action_deviation != nullptr && std::holds_alternative<policy::PolicyParams>(agent);
  double dev = 0.0;
  State1D u = u0;
  double t = 0.0;
  for (std::size_t n = 1; n <= steps; ++n) {
    const double h = n == steps ? t_final - t : dt;
    env::ObservationTensor obs;
    try {
      obs = env::observe(u, spec, opt.boundary);
    } catch (const NumericalError& e) {
      throw BlowUpError(n, e.what());
    }
    weno::check_cfl(h, obs.alpha, u.dx);
    const env::ActionTensor a = env::act(agent, obs);
    if (track) {
      const env::ActionTensor ref = env::act(oracle, obs);
      for (std::size_t k = 0; k < a.weights.size(); ++k) dev = std::max(dev, std::fabs(a.weights[k] - ref.weights[k]));
    }
    u = env::transition(u, env::apply_actions(obs, a), h, spec, n);
    t = n == steps ? t_final : t + dt;
  }
  if (max_action_deviation != nullptr) *max_action_deviation = dev;
  return u;
}

EvalReport evaluate(const env::Agent& agent, const std::string& ic, std::size_t cells,
                    const physics::EquationSpec& spec, const EvalOptions& opt) {
  EvalReport r;
  r.ic = ic;
  r.cells = cells;
  r.t_final = opt.t_final > 0.0 ? opt.t_final : opt.problem.get_double("eval.t_final." + ic);
  r.dt = opt.dt > 0.0 ? opt.dt : opt.problem.get_double("eval.dt");
  r.steps = weno::steps_for(r.t_final, r.dt);
  r.metric = L2Metric::from_config(opt.problem);

  const auto grid = physics::make_grid(cells, opt.problem);
  const State1D u0 = physics::initial_condition(ic, grid, spec, opt.problem);
  weno::SolverOptions so;
  so.boundary = opt.boundary;
  so.coeffs = opt.coeffs;
  r.agent = agent_rollout(agent, u0, spec, r.t_final, r.dt, so, &r.max_action_deviation);
  r.weno = weno::weno_solve(u0, spec, r.t_final, r.dt, so).final_state();
  r.exact = physics::exact_solution(ic, grid, spec, r.t_final, opt.problem);
  r.l2_agent_weno = r.metric(r.agent, r.weno);
  r.l2_weno_exact = r.metric(r.weno, r.exact);
  r.l2_agent_exact = r.metric(r.agent, r.exact);
  return r;
}

io::KeyValue EvalReport::to_keyvalue() const {
  io::KeyValue kv;
  kv.set("ic", ic);
  kv.set("cells", std::to_string(cells));
  kv.set("t_final", io::format_exact(t_final));
  kv.set("dt", io::format_exact(dt));
  kv.set("steps", std::to_string(steps));
  kv.set("l2.metric", metric.describe());
  kv.set("l2.calibration", io::format_exact(metric.calibration));
  kv.set("l2.agent_weno", io::format_exact(l2_agent_weno));
  kv.set("l2.weno_exact", io::format_exact(l2_weno_exact));
  kv.set("l2.agent_exact", io::format_exact(l2_agent_exact));
  kv.set("max_action_deviation", io::format_exact(max_action_deviation));
  return kv;
}

}  // namespace decmdp::training

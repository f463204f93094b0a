#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "decmdp/env/environment.hpp"
#include "decmdp/io/keyvalue.hpp"
#include "decmdp/policy/policy.hpp"

namespace decmdp::training {

// ---------------------------------------------------------------------------
// Gradients

struct GradientResult {
  double episode_return = 0.0;   // kDivergedReturn when diverged
  double partial_return = 0.0;   // the value actually differentiated
  std::vector<double> gradient;  // d(return)/d(params), after clipping
  double norm = 0.0;             // global norm before clipping
  bool clipped = false;
  bool diverged = false;
};

/// Exact gradient of the episode return with respect to the shared network
/// parameters. The network is kept off the tape: the reverse sweep stops at
/// each step's action leaves, runs the batched network VJP and pushes the
/// input adjoints back onto the tape. `clip` <= 0 disables clipping.
GradientResult bptts_gradient(const policy::PolicyParams& params, const env::EpisodeConfig& cfg, double clip = 1.0);

/// Same quantity with every network operation recorded on the tape. Slow;
/// used to cross-check bptts_gradient on small problems. Never clipped.
GradientResult full_tape_gradient(const policy::PolicyParams& params, const env::EpisodeConfig& cfg);

/// Scales `g` to global norm <= clip; returns the norm before scaling.
double clip_global_norm(std::span<double> g, double clip, bool* clipped = nullptr);

// ---------------------------------------------------------------------------
// Optimizer

struct AdamHyper {
  double lr = 3e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

struct AdamState {
  std::vector<double> m;
  std::vector<double> v;
  std::uint64_t step = 0;

  AdamState() = default;
  explicit AdamState(std::size_t n) : m(n, 0.0), v(n, 0.0) {}
};

/// Bias-corrected Adam step in the ascent direction (maximizes the return).
void adam_step(std::span<double> params, std::span<const double> grads, AdamState& state, const AdamHyper& hyper);

// ---------------------------------------------------------------------------
// Training

struct TrainConfig {
  env::EpisodeConfig episode;  // `ic` may list several names, one is drawn per episode
  std::size_t episodes = 500;
  AdamHyper adam;
  double clip = 1.0;
  std::size_t checkpoint_every = 0;  // 0: only at exit
  std::uint64_t seed = 0;
  policy::InputMode input = policy::InputMode::shape;
  /// lr is multiplied by this factor at the end of training (linear ramp); 1 keeps it constant.
  double lr_final_factor = 1.0;

  /// Throws ConfigError on episodes < 1, lr <= 0 and invalid episode settings.
  void validate() const;
  /// Every setting as key = value, used as the checkpoint's config echo.
  io::KeyValue to_keyvalue() const;
};

struct LogRow {
  std::size_t episode = 0;
  double episode_return = 0.0;
  double grad_norm = 0.0;
  bool clipped = false;
  bool diverged = false;
};

struct TrainResult {
  policy::Checkpoint checkpoint;
  std::vector<double> curve;  // per-episode return
  std::vector<LogRow> log;
};

struct TrainHooks {
  std::function<void(const LogRow&)> on_episode;
  /// Called every checkpoint_every episodes with the current parameters.
  std::function<void(std::size_t episode, const policy::Checkpoint&)> on_checkpoint;
};

/// Thrown when more than half of the recent episodes diverged.
class TrainingDiverged : public std::runtime_error {
 public:
  TrainingDiverged(std::size_t episode, const std::string& what)
      : std::runtime_error(what), episode_(episode) {}
  std::size_t episode() const noexcept { return episode_; }

 private:
  std::size_t episode_;
};

/// Runs the episode loop from init_params(seed).
TrainResult train(const TrainConfig& cfg, const TrainHooks& hooks = {});

/// Divergence window: abort when more than half of the last kDivergenceWindow
/// episodes diverged (checked once kDivergenceMinEpisodes have run).
inline constexpr std::size_t kDivergenceWindow = 100;
inline constexpr std::size_t kDivergenceMinEpisodes = 10;

void write_log_csv(const std::vector<LogRow>& log, const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Evaluation

/// sqrt(sum_j (a_j - b_j)^2 dx) * calibration over one field.
struct L2Metric {
  std::size_t field = 0;
  double calibration = 1.0;

  /// From `eval.l2.field` and `eval.l2.calibration`.
  static L2Metric from_config(const io::KeyValue& cfg);
  double operator()(const physics::State1D& a, const physics::State1D& b) const;
  std::string describe() const;
};

struct EvalOptions {
  double t_final = 0.0;  // <= 0: eval.t_final.<ic> from the config
  double dt = 0.0;       // <= 0: eval.dt from the config
  physics::Boundary boundary = physics::Boundary::outflow;
  weno::WenoCoefficients coeffs;
  io::KeyValue problem = io::builtin_defaults();
};

struct EvalReport {
  std::string ic;
  std::size_t cells = 0;
  double t_final = 0.0;
  double dt = 0.0;
  std::size_t steps = 0;
  L2Metric metric;
  double l2_agent_weno = 0.0;
  double l2_weno_exact = 0.0;
  double l2_agent_exact = 0.0;
  double max_action_deviation = 0.0;
  physics::State1D agent;
  physics::State1D weno;
  physics::State1D exact;

  io::KeyValue to_keyvalue() const;
};

/// Rolls out the agent and the classical scheme to t_final (last step
/// shortened) and samples the analytical solution. Throws BlowUpError if
/// either rollout diverges.
EvalReport evaluate(const env::Agent& agent, const std::string& ic, std::size_t cells, const physics::EquationSpec& spec,
                    const EvalOptions& opt = {});

/// Agent rollout only (no reward), tracking the largest |agent - WENO| weight.
physics::State1D agent_rollout(const env::Agent& agent, const physics::State1D& u0, const physics::EquationSpec& spec,
                               double t_final, double dt, const weno::SolverOptions& opt,
                               double* max_action_deviation = nullptr);

}  // namespace decmdp::training

#pragma once

// One agent per (field, interface, split sign). Agents see a three-point
// split-flux stencil and emit the two convex weights of the order r = 2
// reconstruction; the transition is the conservative forward Euler update.

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "decmdp/autodiff/tape.hpp"
#include "decmdp/io/keyvalue.hpp"
#include "decmdp/physics/state.hpp"
#include "decmdp/policy/policy.hpp"
#include "decmdp/weno/reconstruction.hpp"
#include "decmdp/weno/solver.hpp"

namespace decmdp::env {

using physics::State1D;

enum class RewardKind { rl_weno, bc_weno, bc_analytical };

std::string_view reward_name(RewardKind kind);
RewardKind reward_from_name(std::string_view name);

/// Split-flux stencils, Q x (N+1) x 2 x 3 (field, interface, sign, point),
/// upwind first. Interface i lies between cells i-1 and i.
struct ObservationTensor {
  std::size_t fields = 0;
  std::size_t interfaces = 0;
  double alpha = 0.0;
  std::vector<double> values;

  std::size_t agents() const noexcept { return fields * interfaces * 2; }
  double operator()(std::size_t q, std::size_t i, std::size_t s, std::size_t k) const {
    return values[((q * interfaces + i) * 2 + s) * 3 + k];
  }
};

/// Weights, Q x (N+1) x 2 x 2; each last-axis pair lies on the simplex.
struct ActionTensor {
  std::size_t fields = 0;
  std::size_t interfaces = 0;
  std::vector<double> weights;

  double operator()(std::size_t q, std::size_t i, std::size_t s, std::size_t w) const {
    return weights[((q * interfaces + i) * 2 + s) * 2 + w];
  }
  /// Throws ConfigError when an entry leaves [0, 1] or a pair does not sum
  /// to 1 within 1e-12.
  void validate() const;
};

inline constexpr double kSimplexTolerance = 1e-12;

/// Throws NumericalError for an inadmissible state, and if the interior
/// values cannot be recovered from the stencils and alpha.
ObservationTensor observe(const State1D& u, const physics::EquationSpec& spec,
                          physics::Boundary boundary = physics::Boundary::outflow);

/// Interior cell values recovered as (f+ - f-) / alpha, field-major.
std::vector<double> reconstruct_state(const ObservationTensor& obs);

/// Interface fluxes Q x (N+1) from agent weights.
std::vector<double> apply_actions(const ObservationTensor& obs, const ActionTensor& actions);

/// Conservative update; throws BlowUpError(step) on an inadmissible result.
State1D transition(const State1D& u, std::span<const double> fluxes, double dt,
                   const physics::EquationSpec& spec, std::size_t step = 0);

// ---------------------------------------------------------------------------
// Policies

/// Emits the classical WENO weights; reproduces the classical solver exactly.
struct WenoOracle {
  weno::WenoCoefficients coeffs;
};

using Agent = std::variant<WenoOracle, policy::PolicyParams>;

ActionTensor act(const Agent& agent, const ObservationTensor& obs);

// ---------------------------------------------------------------------------
// Rewards

/// Per step: N+1 interface rewards and their sum.
struct RewardTrace {
  std::size_t interfaces = 0;
  std::vector<std::vector<double>> per_interface;
  std::vector<double> system;

  std::size_t steps() const noexcept { return system.size(); }
};

/// r_i = -(e_{i-1} + e_i) / 2 with e_j = sum_q |u_qj - ref_qj|; ghost cells
/// carry no error, so the edge interfaces get -e/2 and the system reward is
/// -sum_j e_j. Returns the interface rewards; system reward is their sum.
std::vector<double> interface_rewards(const State1D& next, const State1D& ref);

/// RL-WENO: the reference is one classical step from the previous state.
std::vector<double> reward_rl_weno(const State1D& prev, const State1D& next, const physics::EquationSpec& spec,
                                   double dt, const weno::SolverOptions& opt = {});

/// BC rewards against a fixed reference trajectory (snapshot t, 1-based step).
/// Throws ConfigError when the trajectory is too short.
std::vector<double> reward_bc(const State1D& next, const std::vector<State1D>& reference, std::size_t t);

// ---------------------------------------------------------------------------
// Episodes

struct EpisodeConfig {
  physics::EquationSpec spec = physics::EquationSpec::euler();
  std::string ic = "sod";
  std::size_t cells = 64;
  double dt = 1e-3;
  std::size_t steps = 100;
  physics::Boundary boundary = physics::Boundary::outflow;
  RewardKind reward = RewardKind::rl_weno;
  std::uint64_t seed = 0;
  weno::WenoCoefficients coeffs;
  /// Domain, gamma-independent IC data. Defaults to the built-in table.
  io::KeyValue problem = io::builtin_defaults();
  /// Differentiate through the splitting speed alpha. When false alpha is a
  /// constant on the tape and the gradient ignores its state dependence.
  bool alpha_gradient = true;
  /// Overrides `ic` when set (grid is taken from the state).
  std::optional<State1D> initial_state;

  /// Throws ConfigError on steps < 1, too few cells, dt <= 0 or CFL > 1 at the IC.
  void validate() const;
  State1D initial() const;
  weno::SolverOptions solver_options() const;
};

enum class TapeMode {
  off,    // plain doubles
  block,  // network evaluated outside the tape; its outputs are leaves
  full,   // every network operation recorded, parameters are leaves
};

/// One batched network call inside a block-mode tape: the ids of the
/// (normalized) inputs and the first of the 2 * batch action leaves.
struct PolicyBlock {
  std::size_t step = 0;
  std::size_t batch = 0;
  ad::NodeId first_action = 0;
  std::vector<ad::NodeId> input_ids;
  std::vector<double> inputs;
};

inline constexpr double kDivergedReturn = -1e3;

struct EpisodeResult {
  std::vector<State1D> trajectory;  // initial state plus one per completed step
  RewardTrace rewards;
  double total_return = 0.0;  // kDivergedReturn when diverged
  double partial_return = 0.0;
  bool diverged = false;
  std::size_t diverged_step = 0;
  std::string divergence_reason;

  std::unique_ptr<ad::Tape> tape;
  ad::NodeId return_node = 0;  // seed; partial return when diverged
  bool has_return_node = false;
  std::vector<PolicyBlock> blocks;
  std::vector<ad::NodeId> param_leaves;  // full mode
  /// Taped modes: node ids of every trajectory state (field-major) and of
  /// every step's weights (ActionTensor layout).
  std::vector<std::vector<ad::NodeId>> state_ids;
  std::vector<std::vector<ad::NodeId>> action_ids;
};

EpisodeResult run_episode(const Agent& agent, const EpisodeConfig& cfg, TapeMode mode = TapeMode::off);

/// Hands the result's tape back to the calling thread for reuse by the next
/// taped episode, which then skips reallocating it.
void recycle_tape(EpisodeResult& result);

/// Reference trajectory for the behaviour-cloning rewards (steps + 1 states).
std::vector<State1D> reference_trajectory(const EpisodeConfig& cfg);

/// Writes `<dir>/<run_id>_summary.txt` (return, divergence, reward series).
void write_episode_summary(const EpisodeResult& result, const EpisodeConfig& cfg, const std::string& path);

}  // namespace decmdp::env

#pragma once

// Property checks shared by `verify`, the test suite and the acceptance
// runner. Each returns the measured value next to its pinned tolerance.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "decmdp/physics/state.hpp"
#include "decmdp/env/environment.hpp"
#include "decmdp/weno/reconstruction.hpp"

namespace decmdp::verify {

struct PropertyResult {
  std::string name;
  std::string group;
  bool passed = false;
  double value = 0.0;      // measured error or count
  double tolerance = 0.0;  // pass iff value <= tolerance (or as stated in detail)
  std::string detail;
};

/// Smooth periodic Euler (rho, rho u, rho E) or Burgers state with
/// seed-dependent phases; rho and p stay well away from zero.
physics::State1D smooth_state(const physics::EquationSpec& spec, std::size_t cells, std::uint64_t seed);

// Gradients ------------------------------------------------------------------

struct GradientCheckOptions {
  std::size_t cells = 32;
  std::size_t steps = 20;
  std::size_t coordinates = 10;
  double h = 1e-6;
  double tolerance = 1e-4;
  std::uint64_t param_seed = 0;
  std::uint64_t coordinate_seed = 0;
};

/// Episode gradient against central differences on Sod.
PropertyResult gradient_vs_finite_differences(const GradientCheckOptions& opt = {});

/// Block-mode gradient against the full-tape gradient on a small problem.
PropertyResult block_vs_full_tape();

/// One environment step (transition and reward) differentiated with respect
/// to the state, against central differences with h = 1e-5.
PropertyResult step_gradient();

// Structure ------------------------------------------------------------------

/// 1e5 random stencils through the batched network: weights in (0,1) with
/// |w0 + w1 - 1| <= 1e-12.
PropertyResult action_simplex(std::size_t samples = 100000);

/// Periodic smooth state, 500 steps: per-field sums conserved to 1e-10
/// relative, for the classical scheme and for a policy.
PropertyResult periodic_conservation(std::size_t steps = 500);

/// A constant state is reproduced bit for bit.
PropertyResult constant_fixed_point();

/// Adjoints of u^t with respect to the weights of step t - k + 1 vanish
/// outside the k-step light cone, for k = 1, 2, 3.
PropertyResult light_cone_scope();

/// The WENO-mimicking agent earns exactly zero under rl-weno.
PropertyResult oracle_zero_return();

/// A random policy earns a strictly negative rl-weno return.
PropertyResult reward_upper_bound();

/// System reward equals the interface sum and -sum_j e_j.
PropertyResult additive_reward();

/// Every agent's weights recomputed from its own stencil alone match the
/// batched evaluation bit for bit.
PropertyResult decentralized_actions();

/// Candidate reconstructions, as given by `candidates`, are exact on linear
/// data; so is any convex combination of them.
using CandidateFn = std::function<weno::Pair<double>(double, double, double)>;
PropertyResult linear_exactness(const CandidateFn& candidates);
PropertyResult linear_exactness();

/// A constant stencil reconstructs to the constant for any weights.
PropertyResult constant_consistency();

/// A y-uniform 2D Riemann problem evolves every row exactly like the 1D
/// solver with the same agent, dt and outflow boundaries. Compares all
/// rows to the 1D state (rho v must stay zero) after t_final.
PropertyResult y_uniform_2d_matches_1d(const env::Agent& agent, const std::string& ic = "sod",
                                       std::size_t nx = 64, std::size_t ny = 8, double t_final = 0.2,
                                       double dt = 1e-3);

// Suite ----------------------------------------------------------------------

enum class Fault { none, candidate_sign };

struct SuiteOptions {
  std::vector<std::string> only;  // empty: every group
  Fault fault = Fault::none;
};

/// Groups: grad, tape, simplex, conservation, fixed-point, scope, reward,
/// decentralization, reconstruction, dimension.
std::vector<std::string> suite_groups();
std::vector<PropertyResult> run_suite(const SuiteOptions& opt = {});

}  // namespace decmdp::verify

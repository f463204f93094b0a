#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

#include "decmdp/physics/state.hpp"
#include "decmdp/weno/reconstruction.hpp"

namespace decmdp::weno {

enum class TimeIntegrator { forward_euler, ssp_rk3 };

std::string_view integrator_name(TimeIntegrator t);
TimeIntegrator integrator_from_name(std::string_view name);

struct SolverOptions {
  physics::Boundary boundary = physics::Boundary::outflow;
  TimeIntegrator integrator = TimeIntegrator::forward_euler;
  WenoCoefficients coeffs;
};

/// Splitting bound used by every step: the physical max wave speed, floored
/// at a tiny positive value so all-zero Burgers states still split.
double splitting_alpha(const physics::State1D& u, const physics::EquationSpec& spec);

/// Classical WENO interface fluxes, Q x (N+1) field-major. Optionally returns
/// the weights (Q x (N+1) x 2 signs x 2) and the alpha used.
std::vector<double> weno_fluxes(const physics::State1D& u, const physics::EquationSpec& spec,
                                const SolverOptions& opt, std::vector<double>* weights = nullptr,
                                double* alpha_out = nullptr);

/// Throws ConfigError when dt * alpha / dx > 1; returns the CFL number.
double check_cfl(double dt, double alpha, double dx);

/// One step of the classical scheme. Throws BlowUpError(step_index) on
/// NaN/Inf or an inadmissible Euler state.
physics::State1D weno_step(const physics::State1D& u, const physics::EquationSpec& spec, double dt,
                           const SolverOptions& opt = {}, std::size_t step_index = 0);

struct Trajectory {
  std::vector<physics::State1D> snapshots;
  std::vector<std::size_t> steps;
  std::vector<double> times;

  const physics::State1D& final_state() const { return snapshots.back(); }
};

/// Runs `steps` steps of size dt. Snapshots are kept every `snapshot_every`
/// steps (0: only the first and last state); the final state is always kept.
Trajectory weno_solve_steps(const physics::State1D& ic, const physics::EquationSpec& spec,
                            std::size_t steps, double dt, const SolverOptions& opt = {},
                            std::size_t snapshot_every = 0);

/// Integrates to t_final with steps of dt; the last step is shortened so the
/// trajectory ends exactly at t_final.
Trajectory weno_solve(const physics::State1D& ic, const physics::EquationSpec& spec, double t_final,
                      double dt, const SolverOptions& opt = {}, std::size_t snapshot_every = 0);

/// Number of steps weno_solve takes for (t_final, dt).
std::size_t steps_for(double t_final, double dt);

}  // namespace decmdp::weno

#include "decmdp/weno/solver.hpp"

#include <cmath>
#include <cstdio>
#include <string>

#include "decmdp/errors.hpp"
#include "decmdp/log.hpp"
#include "decmdp/physics/euler.hpp"
#include "decmdp/simd/kernels.hpp"
#include "decmdp/weno/split.hpp"

namespace decmdp::weno {

using physics::State1D;

namespace {

constexpr double kAlphaFloor = 1e-12;

// du/dt = -(F_{j+1/2} - F_{j-1/2}) / dx evaluated as a forward Euler step.
State1D euler_substep(const State1D& u, const physics::EquationSpec& spec, double dt,
                      const SolverOptions& opt) {
  const std::vector<double> flux = weno_fluxes(u, spec, opt);
  return conservative_update<double>(u, flux, dt);
}

void check_state(const State1D& u, const physics::EquationSpec& spec, std::size_t step) {
  if (!physics::admissible(u, spec)) {
    throw BlowUpError(step, spec.is_euler() ? "non-finite or non-positive density/pressure"
                                            : "non-finite value");
  }
}

}  // namespace

SplitPair lf_split(std::span<const double> f, std::span<const double> u, double alpha) {
  if (!(alpha > 0.0)) throw ConfigError("lf_split: alpha must be positive");
  if (f.size() != u.size()) throw ConfigError("lf_split: flux and state sizes differ");
  SplitPair out{std::vector<double>(f.size()), std::vector<double>(f.size())};
  lf_split_into<double>(f, u, alpha, out.plus, out.minus);
  return out;
}

std::string_view integrator_name(TimeIntegrator t) {
  return t == TimeIntegrator::ssp_rk3 ? "ssp-rk3" : "forward-euler";
}

TimeIntegrator integrator_from_name(std::string_view name) {
  if (name == "forward-euler" || name == "euler") return TimeIntegrator::forward_euler;
  if (name == "ssp-rk3" || name == "rk3") return TimeIntegrator::ssp_rk3;
  throw ConfigError("unknown time integrator '" + std::string(name) + "'");
}

double splitting_alpha(const State1D& u, const physics::EquationSpec& spec) {
  const double alpha = physics::max_wave_speed(u, spec);
  return alpha > kAlphaFloor ? alpha : kAlphaFloor;
}

std::vector<double> weno_fluxes(const State1D& u, const physics::EquationSpec& spec,
                                const SolverOptions& opt, std::vector<double>* weights,
                                double* alpha_out) {
  const double alpha = splitting_alpha(u, spec);
  if (alpha_out != nullptr) *alpha_out = alpha;
  const SplitFluxField<double> split = split_state(u, spec, opt.boundary, alpha);
  const std::size_t ni = split.interfaces();
  const std::size_t ext = split.extended();
  std::vector<double> flux(u.fields * ni);
  if (weights != nullptr) weights->assign(u.fields * ni * 4, 0.0);
  for (std::size_t f = 0; f < u.fields; ++f) {
    simd::WenoFluxArgs args;
    args.plus = split.plus.data() + f * ext;
    args.minus = split.minus.data() + f * ext;
    args.interfaces = ni;
    args.coeffs = opt.coeffs;
    args.flux = flux.data() + f * ni;
    args.weights = weights != nullptr ? weights->data() + f * ni * 4 : nullptr;
    simd::weno_fluxes(args);
  }
  return flux;
}

double check_cfl(double dt, double alpha, double dx) {
  const double cfl = dt * alpha / dx;
  if (!(dt > 0.0)) throw ConfigError("time step must be positive");
  if (cfl > 1.0) throw ConfigError("CFL number " + std::to_string(cfl) + " exceeds 1");
  if (cfl > 0.5) log::warn_once("cfl", "CFL number " + std::to_string(cfl) + " exceeds 0.5");
  return cfl;
}

State1D weno_step(const State1D& u, const physics::EquationSpec& spec, double dt,
                  const SolverOptions& opt, std::size_t step_index) {
  double alpha = 0.0;
  try {
    alpha = splitting_alpha(u, spec);
  } catch (const NumericalError& e) {
    throw BlowUpError(step_index, e.what());
  }
  check_cfl(dt, alpha, u.dx);

  State1D next;
  if (opt.integrator == TimeIntegrator::forward_euler) {
    next = euler_substep(u, spec, dt, opt);
  } else {
    // Shu-Osher SSP-RK3.
    const State1D u1 = euler_substep(u, spec, dt, opt);
    check_state(u1, spec, step_index);
    const State1D u1e = euler_substep(u1, spec, dt, opt);
    State1D u2 = u;
    for (std::size_t k = 0; k < u.q.size(); ++k) u2.q[k] = 0.75 * u.q[k] + 0.25 * u1e.q[k];
    check_state(u2, spec, step_index);
    const State1D u2e = euler_substep(u2, spec, dt, opt);
    next = u;
    for (std::size_t k = 0; k < u.q.size(); ++k) next.q[k] = u.q[k] / 3.0 + 2.0 / 3.0 * u2e.q[k];
  }
  check_state(next, spec, step_index);
  return next;
}

std::size_t steps_for(double t_final, double dt) {
  if (!(dt > 0.0)) throw ConfigError("time step must be positive");
  if (t_final < 0.0) throw ConfigError("final time must be non-negative");
  return static_cast<std::size_t>(std::ceil(t_final / dt - 1e-9));
}

Trajectory weno_solve_steps(const State1D& ic, const physics::EquationSpec& spec, std::size_t steps,
                            double dt, const SolverOptions& opt, std::size_t snapshot_every) {
  Trajectory traj;
  traj.snapshots.push_back(ic);
  traj.steps.push_back(0);
  traj.times.push_back(0.0);
  State1D u = ic;
  for (std::size_t n = 1; n <= steps; ++n) {
    u = weno_step(u, spec, dt, opt, n);
    const bool keep = n == steps || (snapshot_every != 0 && n % snapshot_every == 0);
    if (keep) {
      traj.snapshots.push_back(u);
      traj.steps.push_back(n);
      traj.times.push_back(static_cast<double>(n) * dt);
    }
  }
  return traj;
}

Trajectory weno_solve(const State1D& ic, const physics::EquationSpec& spec, double t_final, double dt,
                      const SolverOptions& opt, std::size_t snapshot_every) {
  const std::size_t steps = steps_for(t_final, dt);
  Trajectory traj;
  traj.snapshots.push_back(ic);
  traj.steps.push_back(0);
  traj.times.push_back(0.0);
  State1D u = ic;
  double t = 0.0;
  for (std::size_t n = 1; n <= steps; ++n) {
    const double h = n == steps ? t_final - t : dt;
    u = weno_step(u, spec, h, opt, n);
    t = n == steps ? t_final : t + dt;
    const bool keep = n == steps || (snapshot_every != 0 && n % snapshot_every == 0);
    if (keep) {
      traj.snapshots.push_back(u);
      traj.steps.push_back(n);
      traj.times.push_back(t);
    }
  }
  return traj;
}

}  // namespace decmdp::weno

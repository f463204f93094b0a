#include "decmdp/env/solve2d.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "decmdp/errors.hpp"
#include "decmdp/physics/euler.hpp"
#include "decmdp/physics/initial_conditions.hpp"
#include "decmdp/simd/kernels.hpp"
#include "decmdp/weno/split.hpp"

namespace decmdp::env {

namespace {

constexpr std::size_t kQ = State2D::kFields;
constexpr double kAlphaFloor = 1e-12;

// Flux along the normal direction with momentum split into normal / tangential.
// With zero tangential momentum this is the 1D Euler flux operation for operation.
std::array<double, kQ> directional_flux(double rho, double mn, double mt, double energy, double gamma) {
  const double un = mn / rho;
  const double ut = mt / rho;
  const double p = (gamma - 1.0) * (energy - 0.5 * (mn * un + mt * ut));
  return {mn, mn * un + p, mt * un, un * (energy + p)};
}

double pressure(double rho, double mu, double mv, double energy, double gamma) {
  return (gamma - 1.0) * (energy - 0.5 * (mu * (mu / rho) + mv * (mv / rho)));
}

// Max |u_n| + c over the grid for one direction (0 = x, 1 = y).
double direction_alpha(const State2D& u, double gamma, int dir) {
  double alpha = 0.0;
  for (std::size_t j = 0; j < u.ny; ++j) {
    for (std::size_t i = 0; i < u.nx; ++i) {
      const double rho = u(0, i, j);
      const double mn = u(dir == 0 ? 1 : 2, i, j);
      const double mt = u(dir == 0 ? 2 : 1, i, j);
      const double p = (gamma - 1.0) * (u(3, i, j) - 0.5 * (mn * (mn / rho) + mt * (mt / rho)));
      if (!(rho > 0.0) || !(p > 0.0)) throw NumericalError("inadmissible 2D state");
      alpha = std::max(alpha, std::fabs(mn / rho) + std::sqrt(gamma * p / rho));
    }
  }
  return alpha > kAlphaFloor ? alpha : kAlphaFloor;
}

// Interface fluxes for every line in one direction: out[(f * lines + l) * (n + 1) + i],
// fields in (rho, rho u, rho v, rho E) order.
std::vector<double> line_fluxes(const Agent& agent, const State2D& u, const Config2D& cfg, int dir) {
  const std::size_t n = dir == 0 ? u.nx : u.ny;
  const std::size_t lines = dir == 0 ? u.ny : u.nx;
  const std::size_t ext = n + 2 * weno::kGhost;
  const std::size_t ni = n + 1;
  const double alpha = direction_alpha(u, cfg.gamma, dir);
  // Field slots along a line: rho, normal momentum, tangential momentum, energy.
  const std::array<std::size_t, kQ> slot = {0, dir == 0 ? 1u : 2u, dir == 0 ? 2u : 1u, 3};

  std::vector<double> plus(lines * kQ * ext);
  std::vector<double> minus(lines * kQ * ext);
  std::array<std::vector<double>, kQ> eu;
  for (auto& v : eu) v.resize(ext);
  for (std::size_t l = 0; l < lines; ++l) {
    for (std::size_t e = 0; e < ext; ++e) {
      const auto c = static_cast<std::ptrdiff_t>(e) - static_cast<std::ptrdiff_t>(weno::kGhost);
      const auto nn = static_cast<std::ptrdiff_t>(n);
      std::size_t src = 0;
      if (cfg.boundary == physics::Boundary::periodic) {
        src = static_cast<std::size_t>(((c % nn) + nn) % nn);
      } else {
        src = c < 0 ? 0 : (c >= nn ? n - 1 : static_cast<std::size_t>(c));
      }
      for (std::size_t s = 0; s < kQ; ++s) eu[s][e] = dir == 0 ? u(slot[s], src, l) : u(slot[s], l, src);
    }
    for (std::size_t e = 0; e < ext; ++e) {
      const auto F = directional_flux(eu[0][e], eu[1][e], eu[2][e], eu[3][e], cfg.gamma);
      for (std::size_t s = 0; s < kQ; ++s) {
        const std::size_t k = (l * kQ + s) * ext + e;
        plus[k] = 0.5 * (F[s] + alpha * eu[s][e]);
        minus[k] = 0.5 * (F[s] - alpha * eu[s][e]);
      }
    }
  }

  std::vector<double> line_flux(lines * kQ * ni);
  if (const auto* oracle = std::get_if<WenoOracle>(&agent)) {
    for (std::size_t ls = 0; ls < lines * kQ; ++ls) {
      simd::WenoFluxArgs args;
      args.plus = plus.data() + ls * ext;
      args.minus = minus.data() + ls * ext;
      args.interfaces = ni;
      args.coeffs = oracle->coeffs;
      args.flux = line_flux.data() + ls * ni;
      simd::weno_fluxes(args);
    }
  } else {
    // One batch over every line, field, interface and sign.
    std::vector<double> stencils(lines * kQ * ni * 2 * 3);
    std::size_t b = 0;
    for (std::size_t ls = 0; ls < lines * kQ; ++ls) {
      const double* p = plus.data() + ls * ext;
      const double* m = minus.data() + ls * ext;
      for (std::size_t i = 0; i < ni; ++i) {
        stencils[b++] = p[i];
        stencils[b++] = p[i + 1];
        stencils[b++] = p[i + 2];
        stencils[b++] = m[i + 3];
        stencils[b++] = m[i + 2];
        stencils[b++] = m[i + 1];
      }
    }
    std::vector<double> w(stencils.size() / 3 * 2);
    policy::policy_forward_batch(std::get<policy::PolicyParams>(agent), stencils, w);
    for (std::size_t a = 0; a < lines * kQ * ni; ++a) {
      const double* s = stencils.data() + 6 * a;
      const double fp = weno::reconstruct(s[0], s[1], s[2], weno::Pair<double>{w[4 * a], w[4 * a + 1]});
      const double fm = weno::reconstruct(s[3], s[4], s[5], weno::Pair<double>{w[4 * a + 2], w[4 * a + 3]});
      line_flux[a] = fp + fm;
    }
  }

  // Reorder to (rho, rho u, rho v, rho E).
  std::vector<double> out(kQ * lines * ni);
  for (std::size_t l = 0; l < lines; ++l) {
    for (std::size_t s = 0; s < kQ; ++s) {
      std::copy_n(line_flux.begin() + static_cast<std::ptrdiff_t>((l * kQ + s) * ni), ni,
                  out.begin() + static_cast<std::ptrdiff_t>((slot[s] * lines + l) * ni));
    }
  }
  return out;
}

State2D euler_substep(const Agent& agent, const State2D& u, const Config2D& cfg, double dt) {
  const std::vector<double> fx = line_fluxes(agent, u, cfg, 0);
  const std::vector<double> fy = line_fluxes(agent, u, cfg, 1);
  const double rx = dt / u.dx;
  const double ry = dt / u.dy;
  State2D next = u;
  for (std::size_t f = 0; f < kQ; ++f) {
    for (std::size_t j = 0; j < u.ny; ++j) {
      for (std::size_t i = 0; i < u.nx; ++i) {
        const std::size_t ix = (f * u.ny + j) * (u.nx + 1) + i;
        const std::size_t iy = (f * u.nx + i) * (u.ny + 1) + j;
        const double v = u(f, i, j) - rx * (fx[ix + 1] - fx[ix]);
        next(f, i, j) = v - ry * (fy[iy + 1] - fy[iy]);
      }
    }
  }
  return next;
}

void check(const State2D& u, double gamma, std::size_t step) {
  if (!admissible(u, gamma)) throw BlowUpError(step, "non-finite or non-positive density/pressure in 2D state");
}

}  // namespace

State2D::State2D(std::size_t cx, std::size_t cy, double x_min, double x_max, double y_min, double y_max)
    : nx(cx),
      ny(cy),
      dx((x_max - x_min) / static_cast<double>(cx)),
      dy((y_max - y_min) / static_cast<double>(cy)),
      x0(x_min),
      y0(y_min),
      q(kFields * cx * cy) {}

void Config2D::validate() const {
  if (nx < physics::kMinCells || ny < physics::kMinCells) throw ConfigError("2D grid needs at least 5 cells per side");
  if (!(gamma > 1.0)) throw ConfigError("gamma must exceed 1");
  if (!(dt > 0.0)) throw ConfigError("time step must be positive");
  if (!(t_final > 0.0)) throw ConfigError("final time must be positive");
}

State2D initial_condition_2d(const Config2D& cfg) {
  cfg.validate();
  const double x_min = cfg.problem.get_double("domain.x_min", 0.0);
  const double x_max = cfg.problem.get_double("domain.x_max", 1.0);
  const double y_min = cfg.problem.get_double("domain.y_min", 0.0);
  const double y_max = cfg.problem.get_double("domain.y_max", 1.0);
  State2D u(cfg.nx, cfg.ny, x_min, x_max, y_min, y_max);
  if (cfg.ic == "kelvin-helmholtz") {
    const double rho_in = cfg.problem.get_double("ic.kelvin-helmholtz.rho_inner", 2.0);
    const double rho_out = cfg.problem.get_double("ic.kelvin-helmholtz.rho_outer", 1.0);
    const double shear = cfg.problem.get_double("ic.kelvin-helmholtz.shear", 0.5);
    const double p = cfg.problem.get_double("ic.kelvin-helmholtz.pressure", 2.5);
    const double amp = cfg.problem.get_double("ic.kelvin-helmholtz.perturbation", 0.01);
    const double ymid = 0.5 * (y_min + y_max);
    const double quarter = 0.25 * (y_max - y_min);
    for (std::size_t j = 0; j < u.ny; ++j) {
      for (std::size_t i = 0; i < u.nx; ++i) {
        const double x = u.x_center(i);
        const double y = u.y_center(j);
        const bool inner = std::fabs(y - ymid) < quarter;
        const double rho = inner ? rho_in : rho_out;
        const double vx = inner ? shear : -shear;
        const double vy = amp * std::sin(4.0 * std::numbers::pi * (x - x_min) / (x_max - x_min));
        u(0, i, j) = rho;
        u(1, i, j) = rho * vx;
        u(2, i, j) = rho * vy;
        u(3, i, j) = p / (cfg.gamma - 1.0) + 0.5 * rho * (vx * vx + vy * vy);
      }
    }
    return u;
  }
  if (!physics::is_euler_ic(cfg.ic)) throw ConfigError("unknown 2D initial condition '" + cfg.ic + "'");
  const auto grid = physics::make_grid(cfg.nx, cfg.problem);
  const State1D row = physics::initial_condition(cfg.ic, grid, physics::EquationSpec::euler(cfg.gamma), cfg.problem);
  for (std::size_t j = 0; j < u.ny; ++j) {
    for (std::size_t i = 0; i < u.nx; ++i) {
      u(0, i, j) = row(0, i);
      u(1, i, j) = row(1, i);
      u(2, i, j) = 0.0;
      u(3, i, j) = row(2, i);
    }
  }
  return u;
}

bool admissible(const State2D& u, double gamma) {
  for (std::size_t j = 0; j < u.ny; ++j) {
    for (std::size_t i = 0; i < u.nx; ++i) {
      const double rho = u(0, i, j);
      const double e = u(3, i, j);
      if (!std::isfinite(rho) || !std::isfinite(u(1, i, j)) || !std::isfinite(u(2, i, j)) || !std::isfinite(e)) {
        return false;
      }
      if (!(rho > 0.0) || !(pressure(rho, u(1, i, j), u(2, i, j), e, gamma) > 0.0)) return false;
    }
  }
  return true;
}

State2D step_2d(const Agent& agent, const State2D& u, const Config2D& cfg, double dt, std::size_t step) {
  try {
    const double cfl = dt * direction_alpha(u, cfg.gamma, 0) / u.dx + dt * direction_alpha(u, cfg.gamma, 1) / u.dy;
    if (cfl > 1.0) throw BlowUpError(step, "2D CFL number " + std::to_string(cfl) + " exceeds 1");
    if (cfg.integrator == weno::TimeIntegrator::forward_euler) {
      State2D next = euler_substep(agent, u, cfg, dt);
      check(next, cfg.gamma, step);
      return next;
    }
    const State2D u1 = euler_substep(agent, u, cfg, dt);
    check(u1, cfg.gamma, step);
    const State2D u1e = euler_substep(agent, u1, cfg, dt);
    State2D u2 = u;
    for (std::size_t k = 0; k < u.q.size(); ++k) u2.q[k] = 0.75 * u.q[k] + 0.25 * u1e.q[k];
    check(u2, cfg.gamma, step);
    const State2D u2e = euler_substep(agent, u2, cfg, dt);
    State2D next = u;
    for (std::size_t k = 0; k < u.q.size(); ++k) next.q[k] = u.q[k] / 3.0 + 2.0 / 3.0 * u2e.q[k];
    check(next, cfg.gamma, step);
    return next;
  } catch (const NumericalError& e) {
    throw BlowUpError(step, e.what());
  }
}

Trajectory2D solve_2d(const Agent& agent, const Config2D& cfg) {
  State2D u = initial_condition_2d(cfg);
  Trajectory2D traj;
  traj.snapshots.push_back(u);
  traj.steps.push_back(0);
  traj.times.push_back(0.0);
  auto track = [&](const State2D& s) {
    for (std::size_t j = 0; j < s.ny; ++j) {
      for (std::size_t i = 0; i < s.nx; ++i) {
        traj.min_density = std::min(traj.min_density, s(0, i, j));
        traj.min_pressure = std::min(traj.min_pressure, pressure(s(0, i, j), s(1, i, j), s(2, i, j), s(3, i, j), cfg.gamma));
      }
    }
  };
  traj.min_density = u(0, 0, 0);
  traj.min_pressure = pressure(u(0, 0, 0), u(1, 0, 0), u(2, 0, 0), u(3, 0, 0), cfg.gamma);
  track(u);
  const std::size_t steps = weno::steps_for(cfg.t_final, cfg.dt);
  double t = 0.0;
  for (std::size_t n = 1; n <= steps; ++n) {
    const double h = n == steps ? cfg.t_final - t : cfg.dt;
    u = step_2d(agent, u, cfg, h, n);
    t = n == steps ? cfg.t_final : t + cfg.dt;
    track(u);
    if (n == steps || (cfg.snapshot_every != 0 && n % cfg.snapshot_every == 0)) {
      traj.snapshots.push_back(u);
      traj.steps.push_back(n);
      traj.times.push_back(t);
    }
  }
  return traj;
}

}  // namespace decmdp::env

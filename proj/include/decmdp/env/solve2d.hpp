#pragma once

// 2D Euler, dimension by dimension: every row is reconstructed as a 1D
// problem in x, every column in y, and both flux differences enter one
// unsplit update. The same 1D agent handles both directions.

#include <cstddef>
#include <string>
#include <vector>

#include "decmdp/env/environment.hpp"
#include "decmdp/io/keyvalue.hpp"
#include "decmdp/physics/state.hpp"
#include "decmdp/weno/solver.hpp"

namespace decmdp::env {

/// Conserved (rho, rho u, rho v, rho E), field-major, row-major within a
/// field: q[(f * ny + j) * nx + i] with i along x and j along y.
struct State2D {
  std::size_t nx = 0;
  std::size_t ny = 0;
  double dx = 0.0;
  double dy = 0.0;
  double x0 = 0.0;
  double y0 = 0.0;
  std::vector<double> q;

  static constexpr std::size_t kFields = 4;

  State2D() = default;
  State2D(std::size_t cx, std::size_t cy, double x_min, double x_max, double y_min, double y_max);

  double& operator()(std::size_t f, std::size_t i, std::size_t j) { return q[(f * ny + j) * nx + i]; }
  double operator()(std::size_t f, std::size_t i, std::size_t j) const { return q[(f * ny + j) * nx + i]; }
  double x_center(std::size_t i) const noexcept { return x0 + (static_cast<double>(i) + 0.5) * dx; }
  double y_center(std::size_t j) const noexcept { return y0 + (static_cast<double>(j) + 0.5) * dy; }
};

struct Config2D {
  std::string ic = "kelvin-helmholtz";  // or a 1D Euler IC name, extended uniformly in y
  std::size_t nx = 64;
  std::size_t ny = 64;
  double gamma = 1.4;
  double dt = 1e-3;
  double t_final = 2.0;
  physics::Boundary boundary = physics::Boundary::periodic;
  weno::TimeIntegrator integrator = weno::TimeIntegrator::forward_euler;
  weno::WenoCoefficients coeffs;
  std::size_t snapshot_every = 0;  // 0: first and last only
  io::KeyValue problem = io::builtin_defaults();

  void validate() const;
};

struct Trajectory2D {
  std::vector<State2D> snapshots;
  std::vector<std::size_t> steps;
  std::vector<double> times;
  double min_density = 0.0;   // over every step
  double min_pressure = 0.0;  // over every step
};

/// Kelvin-Helmholtz shear layer on [0,1]^2, or a y-uniform 1D Riemann IC.
State2D initial_condition_2d(const Config2D& cfg);

bool admissible(const State2D& u, double gamma);

/// One step; throws BlowUpError(step) on NaN or rho, p <= 0.
State2D step_2d(const Agent& agent, const State2D& u, const Config2D& cfg, double dt, std::size_t step);

/// Integrates to cfg.t_final (last step shortened).
Trajectory2D solve_2d(const Agent& agent, const Config2D& cfg);

}  // namespace decmdp::env

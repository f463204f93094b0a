#include <cmath>
#include <string>

#include "decmdp/physics/euler.hpp"
#include "decmdp/physics/initial_conditions.hpp"

namespace decmdp::physics {

std::string_view equation_name(EquationKind kind) {
  switch (kind) {
    case EquationKind::euler1d: return "euler";
    case EquationKind::burgers1d: return "burgers";
    case EquationKind::euler2d: return "euler2d";
  }
  return "?";
}

EquationKind equation_from_name(std::string_view name) {
  if (name == "euler" || name == "euler1d") return EquationKind::euler1d;
  if (name == "burgers" || name == "burgers1d") return EquationKind::burgers1d;
  if (name == "euler2d") return EquationKind::euler2d;
  throw ConfigError("unknown equation '" + std::string(name) + "'");
}

void EquationSpec::validate() const {
  if (is_euler() && !(gamma > 1.0)) throw ConfigError("gamma must exceed 1");
}

std::vector<std::string> field_names(const EquationSpec& spec) {
  switch (spec.kind) {
    case EquationKind::euler1d: return {"rho", "rho_u", "rho_E"};
    case EquationKind::burgers1d: return {"u"};
    case EquationKind::euler2d: return {"rho", "rho_u", "rho_v", "rho_E"};
  }
  return {};
}

std::string_view boundary_name(Boundary b) { return b == Boundary::periodic ? "periodic" : "outflow"; }

Boundary boundary_from_name(std::string_view name) {
  if (name == "outflow") return Boundary::outflow;
  if (name == "periodic") return Boundary::periodic;
  throw ConfigError("unknown boundary '" + std::string(name) + "'");
}

void Grid1D::validate() const {
  if (cells < kMinCells) throw ConfigError("need at least 5 cells for an r=2 stencil");
  if (!(x_max > x_min)) throw ConfigError("domain must have x_max > x_min");
}

double max_wave_speed(const State1D& state, const EquationSpec& spec) {
  double alpha = 0.0;
  if (spec.kind == EquationKind::burgers1d) {
    for (double u : state.q) {
      if (!std::isfinite(u)) throw NumericalError("max_wave_speed: non-finite state");
      alpha = std::max(alpha, std::fabs(u));
    }
    return alpha;
  }
  for (std::size_t j = 0; j < state.cells; ++j) {
    const double rho = state(0, j);
    const double mom = state(1, j);
    const double energy = state(2, j);
    const double p = euler_pressure(rho, mom, energy, spec.gamma);
    if (!(rho > 0.0) || !(p > 0.0) || !std::isfinite(energy)) {
      throw NumericalError("max_wave_speed: inadmissible state at cell " + std::to_string(j));
    }
    alpha = std::max(alpha, euler_wave_speed(rho, mom, energy, spec.gamma));
  }
  return alpha;
}

bool admissible(const State1D& state, const EquationSpec& spec) {
  if (spec.kind == EquationKind::burgers1d) {
    for (double u : state.q) {
      if (!std::isfinite(u)) return false;
    }
    return true;
  }
  for (std::size_t j = 0; j < state.cells; ++j) {
    const double rho = state(0, j);
    const double mom = state(1, j);
    const double energy = state(2, j);
    if (!std::isfinite(rho) || !std::isfinite(mom) || !std::isfinite(energy)) return false;
    if (!(rho > 0.0)) return false;
    if (!(euler_pressure(rho, mom, energy, spec.gamma) > 0.0)) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Initial conditions

const std::vector<std::string>& euler_ic_names() {
  static const std::vector<std::string> names = {"sod", "sod2", "lax", "sonic-rarefaction"};
  return names;
}

bool is_euler_ic(std::string_view name) {
  for (const auto& n : euler_ic_names()) {
    if (n == name) return true;
  }
  return false;
}

bool is_burgers_ic(std::string_view name) { return name == "burgers-rarefaction"; }

RiemannIC riemann_ic(std::string_view name, const io::KeyValue& cfg) {
  if (!is_euler_ic(name)) throw ConfigError("unknown Euler initial condition '" + std::string(name) + "'");
  const std::string base = "ic." + std::string(name) + ".";
  const auto l = cfg.get_doubles(base + "left");
  const auto r = cfg.get_doubles(base + "right");
  if (l.size() != 3 || r.size() != 3) throw ConfigError(base + "left/right need three values (rho u p)");
  RiemannIC ic{{l[0], l[1], l[2]}, {r[0], r[1], r[2]}, cfg.get_double(base + "diaphragm")};
  ic.validate();
  return ic;
}

BurgersRiemannIC burgers_ic(std::string_view name, const io::KeyValue& cfg) {
  if (!is_burgers_ic(name)) throw ConfigError("unknown Burgers initial condition '" + std::string(name) + "'");
  const std::string base = "ic." + std::string(name) + ".";
  return {cfg.get_double(base + "left"), cfg.get_double(base + "right"), cfg.get_double(base + "diaphragm")};
}

Grid1D make_grid(std::size_t cells, const io::KeyValue& cfg) {
  Grid1D g{cells, cfg.get_double("domain.x_min", 0.0), cfg.get_double("domain.x_max", 1.0)};
  g.validate();
  return g;
}

State1D sample_riemann(const RiemannIC& ic, double gamma, const Grid1D& grid) {
  State1D s(3, grid.cells, grid.dx(), grid.x_min);
  for (std::size_t j = 0; j < grid.cells; ++j) {
    const Primitive& w = grid.x_center(j) < ic.diaphragm ? ic.left : ic.right;
    const auto U = to_conserved(w, gamma);
    for (std::size_t f = 0; f < 3; ++f) s(f, j) = U[f];
  }
  return s;
}

State1D sample_burgers(const BurgersRiemannIC& ic, const Grid1D& grid) {
  State1D s(1, grid.cells, grid.dx(), grid.x_min);
  for (std::size_t j = 0; j < grid.cells; ++j) s(0, j) = burgers_exact(ic, grid.x_center(j), 0.0);
  return s;
}

State1D initial_condition(std::string_view name, const Grid1D& grid, const EquationSpec& spec,
                          const io::KeyValue& cfg) {
  grid.validate();
  spec.validate();
  if (name == "custom") throw ConfigError("'custom' initial condition needs explicit values");
  if (spec.kind == EquationKind::euler1d) {
    if (!is_euler_ic(name)) {
      throw ConfigError("initial condition '" + std::string(name) + "' is not defined for 1D Euler");
    }
    return sample_riemann(riemann_ic(name, cfg), spec.gamma, grid);
  }
  if (spec.kind == EquationKind::burgers1d) {
    if (!is_burgers_ic(name)) {
      throw ConfigError("initial condition '" + std::string(name) + "' is not defined for Burgers");
    }
    return sample_burgers(burgers_ic(name, cfg), grid);
  }
  throw ConfigError("initial_condition: 2D problems are built by the 2D solver");
}

State1D custom_initial_condition(const EquationSpec& spec, const Grid1D& grid,
                                 std::span<const double> conserved) {
  grid.validate();
  if (conserved.size() != spec.fields() * grid.cells) {
    throw ConfigError("custom initial condition: expected " + std::to_string(spec.fields() * grid.cells) +
                      " values");
  }
  State1D s(spec.fields(), grid.cells, grid.dx(), grid.x_min);
  s.q.assign(conserved.begin(), conserved.end());
  return s;
}

State1D exact_solution(std::string_view name, const Grid1D& grid, const EquationSpec& spec, double t,
                       const io::KeyValue& cfg) {
  if (spec.kind == EquationKind::burgers1d) {
    const BurgersRiemannIC ic = burgers_ic(name, cfg);
    State1D s(1, grid.cells, grid.dx(), grid.x_min);
    for (std::size_t j = 0; j < grid.cells; ++j) s(0, j) = burgers_exact(ic, grid.x_center(j), t);
    return s;
  }
  const ExactRiemannSolver solver(riemann_ic(name, cfg), spec.gamma);
  State1D s(3, grid.cells, grid.dx(), grid.x_min);
  for (std::size_t j = 0; j < grid.cells; ++j) {
    const auto U = to_conserved(solver.at(grid.x_center(j), t), spec.gamma);
    for (std::size_t f = 0; f < 3; ++f) s(f, j) = U[f];
  }
  return s;
}

}  // namespace decmdp::physics

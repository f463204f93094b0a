#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "decmdp/io/keyvalue.hpp"
#include "decmdp/physics/riemann.hpp"
#include "decmdp/physics/state.hpp"

namespace decmdp::physics {

/// Built-in 1D initial conditions. Euler names read `ic.<name>.left`,
/// `ic.<name>.right` (rho u p) and `ic.<name>.diaphragm` from the config;
/// `burgers-rarefaction` reads scalar left/right values.
const std::vector<std::string>& euler_ic_names();
bool is_euler_ic(std::string_view name);
bool is_burgers_ic(std::string_view name);

RiemannIC riemann_ic(std::string_view name, const io::KeyValue& cfg = io::builtin_defaults());
BurgersRiemannIC burgers_ic(std::string_view name, const io::KeyValue& cfg = io::builtin_defaults());

/// Domain from `domain.x_min` / `domain.x_max`.
Grid1D make_grid(std::size_t cells, const io::KeyValue& cfg = io::builtin_defaults());

State1D sample_riemann(const RiemannIC& ic, double gamma, const Grid1D& grid);
State1D sample_burgers(const BurgersRiemannIC& ic, const Grid1D& grid);

/// Cell-centre sampling of a named IC. `custom` is rejected here; use
/// custom_initial_condition. Throws ConfigError on unknown names or when the
/// IC does not belong to the equation.
State1D initial_condition(std::string_view name, const Grid1D& grid, const EquationSpec& spec,
                          const io::KeyValue& cfg = io::builtin_defaults());

/// Pass-through of user-provided conserved values (field-major, Q x N).
State1D custom_initial_condition(const EquationSpec& spec, const Grid1D& grid,
                                 std::span<const double> conserved);

/// Analytical solution of a named Riemann-type IC at time t, in conserved form.
State1D exact_solution(std::string_view name, const Grid1D& grid, const EquationSpec& spec, double t,
                       const io::KeyValue& cfg = io::builtin_defaults());

}  // namespace decmdp::physics

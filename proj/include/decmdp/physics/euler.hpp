#pragma once

#include <array>
#include <cmath>

#include "decmdp/autodiff/var.hpp"
#include "decmdp/errors.hpp"
#include "decmdp/physics/state.hpp"

namespace decmdp::physics {

/// (rho, u, p)
struct Primitive {
  double rho = 0.0;
  double u = 0.0;
  double p = 0.0;
};

/// (rho, rho u, rho E) with E = e + u^2/2 and p = rho e (gamma - 1).
inline std::array<double, 3> to_conserved(const Primitive& w, double gamma) {
  const double e = w.p / (w.rho * (gamma - 1.0));
  return {w.rho, w.rho * w.u, w.rho * (e + 0.5 * w.u * w.u)};
}

inline Primitive to_primitive(const std::array<double, 3>& U, double gamma) {
  const double rho = U[0];
  const double u = U[1] / rho;
  const double p = (gamma - 1.0) * (U[2] - 0.5 * U[1] * u);
  return {rho, u, p};
}

/// Pressure from conserved variables; generic over double / ad::Var.
template <class T>
T euler_pressure(const T& rho, const T& mom, const T& energy, double gamma) {
  const T u = mom / rho;
  return (gamma - 1.0) * (energy - 0.5 * (mom * u));
}

/// F(U) = (rho u, rho u^2 + p, u (rho E + p)).
template <class T>
std::array<T, 3> euler_flux(const T& rho, const T& mom, const T& energy, double gamma) {
  const T u = mom / rho;
  const T p = (gamma - 1.0) * (energy - 0.5 * (mom * u));
  return {mom, mom * u + p, u * (energy + p)};
}

/// Checked variant used at API boundaries.
inline std::array<double, 3> euler_flux_checked(const std::array<double, 3>& U, double gamma) {
  if (!(U[0] > 0.0)) throw NumericalError("euler_flux: non-positive density");
  return euler_flux(U[0], U[1], U[2], gamma);
}

/// |u| + c for one cell.
template <class T>
T euler_wave_speed(const T& rho, const T& mom, const T& energy, double gamma) {
  const T p = euler_pressure(rho, mom, energy, gamma);
  return math::abs(mom / rho) + math::sqrt(gamma * p / rho);
}

template <class T>
T burgers_flux(const T& u) {
  return 0.5 * math::square(u);
}

inline double sound_speed(double rho, double p, double gamma) { return std::sqrt(gamma * p / rho); }

/// Lax-Friedrichs splitting bound: max |u| + c (Euler) or max |u| (Burgers).
/// Throws NumericalError on an inadmissible Euler cell.
double max_wave_speed(const State1D& state, const EquationSpec& spec);

/// True when every Euler cell has rho > 0 and p > 0 and all values are finite.
bool admissible(const State1D& state, const EquationSpec& spec);

}  // namespace decmdp::physics

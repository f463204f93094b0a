#include <cmath>

#include "decmdp/errors.hpp"
#include "decmdp/physics/euler.hpp"
#include "decmdp/physics/initial_conditions.hpp"
#include "decmdp/physics/riemann.hpp"
#include "doctest.h"

using namespace decmdp;
using physics::Primitive;

namespace {

// Pressure function of one wave for a gamma-law gas.
double wave_function(double p, const Primitive& w, double g) {
  const double c = std::sqrt(g * w.p / w.rho);
  if (p > w.p) {
    const double a = 2.0 / ((g + 1.0) * w.rho);
    const double b = (g - 1.0) / (g + 1.0) * w.p;
    return (p - w.p) * std::sqrt(a / (p + b));
  }
  return 2.0 * c / (g - 1.0) * (std::pow(p / w.p, (g - 1.0) / (2.0 * g)) - 1.0);
}

// Star pressure by plain bisection, independent of the library's Newton solve.
double bisect_star_pressure(const Primitive& l, const Primitive& r, double g) {
  double lo = 1e-12, hi = 100.0;
  for (int k = 0; k < 200; ++k) {
    const double mid = 0.5 * (lo + hi);
    const double f = wave_function(mid, l, g) + wave_function(mid, r, g) + (r.u - l.u);
    (f > 0.0 ? hi : lo) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

TEST_SUITE("physics") {

TEST_CASE("Sod star state") {
  const physics::RiemannIC ic = physics::riemann_ic("sod");
  const physics::ExactRiemannSolver s(ic, 1.4);
  CHECK(s.star_pressure() == doctest::Approx(0.30313).epsilon(1e-5));
  CHECK(s.star_velocity() == doctest::Approx(0.92745).epsilon(1e-5));
  CHECK(s.star_pressure() == doctest::Approx(bisect_star_pressure(ic.left, ic.right, 1.4)).epsilon(1e-9));
  CHECK_FALSE(s.left_is_shock());
  CHECK(s.right_is_shock());
}

TEST_CASE("star pressure matches bisection for every built-in problem") {
  for (const auto& name : physics::euler_ic_names()) {
    const physics::RiemannIC ic = physics::riemann_ic(name);
    const physics::ExactRiemannSolver s(ic, 1.4);
    CHECK_MESSAGE(s.star_pressure() == doctest::Approx(bisect_star_pressure(ic.left, ic.right, 1.4)).epsilon(1e-9),
                  name);
  }
}

TEST_CASE("Rankine-Hugoniot conditions across the Sod shock") {
  const physics::RiemannIC ic = physics::riemann_ic("sod");
  const double g = 1.4;
  const physics::ExactRiemannSolver s(ic, g);
  const double S = s.right_shock_speed();
  const Primitive pre = ic.right;
  const Primitive post{s.right_star_density(), s.star_velocity(), s.star_pressure()};
  const auto U0 = physics::to_conserved(pre, g);
  const auto U1 = physics::to_conserved(post, g);
  const auto F0 = physics::euler_flux(U0[0], U0[1], U0[2], g);
  const auto F1 = physics::euler_flux(U1[0], U1[1], U1[2], g);
  for (int k = 0; k < 3; ++k) CHECK(F1[k] - F0[k] == doctest::Approx(S * (U1[k] - U0[k])).epsilon(1e-9));
}

TEST_CASE("exact solution regions") {
  const physics::RiemannIC ic = physics::riemann_ic("sod");
  const physics::ExactRiemannSolver s(ic, 1.4);
  const Primitive far_left = s.at(0.0, 0.2);
  const Primitive far_right = s.at(1.0, 0.2);
  CHECK(far_left.rho == 1.0);
  CHECK(far_right.rho == 0.125);
  const Primitive contact_left = s.sample(s.star_velocity() - 1e-9);
  const Primitive contact_right = s.sample(s.star_velocity() + 1e-9);
  CHECK(contact_left.p == doctest::Approx(contact_right.p));
  CHECK(contact_left.rho == doctest::Approx(s.left_star_density()));
  CHECK(contact_right.rho == doctest::Approx(s.right_star_density()));
}

TEST_CASE("conserved and primitive variables round-trip") {
  const Primitive w{0.7, -0.3, 2.1};
  const Primitive back = physics::to_primitive(physics::to_conserved(w, 1.4), 1.4);
  CHECK(back.rho == doctest::Approx(w.rho));
  CHECK(back.u == doctest::Approx(w.u));
  CHECK(back.p == doctest::Approx(w.p));
}

TEST_CASE("Burgers entropy solution") {
  const physics::BurgersRiemannIC fan{-0.5, 1.0, 0.5};
  CHECK(physics::burgers_exact(fan, 0.2, 0.2) == -0.5);
  CHECK(physics::burgers_exact(fan, 0.5 + 0.1, 0.2) == doctest::Approx(0.5));
  CHECK(physics::burgers_exact(fan, 0.9, 0.2) == 1.0);
  const physics::BurgersRiemannIC shock{1.0, 0.0, 0.5};
  CHECK(physics::burgers_exact(shock, 0.5 + 0.5 * 0.2 - 1e-9, 0.2) == 1.0);
  CHECK(physics::burgers_exact(shock, 0.5 + 0.5 * 0.2 + 1e-9, 0.2) == 0.0);
}

TEST_CASE("wave speed and admissibility") {
  const physics::Grid1D grid{8, 0.0, 1.0};
  const auto spec = physics::EquationSpec::euler();
  physics::State1D u = physics::initial_condition("sod", grid, spec);
  CHECK(physics::admissible(u, spec));
  CHECK(physics::max_wave_speed(u, spec) == doctest::Approx(std::sqrt(1.4)));
  u(2, 0) = 0.0;  // energy below kinetic: negative pressure
  CHECK_FALSE(physics::admissible(u, spec));
  CHECK_THROWS_AS(physics::max_wave_speed(u, spec), NumericalError);
}

TEST_CASE("names and validation") {
  CHECK(physics::equation_from_name(physics::equation_name(physics::EquationKind::burgers1d)) ==
        physics::EquationKind::burgers1d);
  CHECK_THROWS_AS(physics::equation_from_name("navier-stokes"), ConfigError);
  CHECK_THROWS_AS(physics::boundary_from_name("reflective"), ConfigError);
  CHECK_THROWS_AS(physics::riemann_ic("no-such-ic"), ConfigError);
  physics::EquationSpec bad = physics::EquationSpec::euler(1.0);
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  CHECK_THROWS_AS((physics::Grid1D{3, 0.0, 1.0}).validate(), ConfigError);
  CHECK_THROWS_AS((physics::RiemannIC{{1.0, 0.0, -1.0}, {1.0, 0.0, 1.0}, 0.5}).validate(), ConfigError);
}

TEST_CASE("vacuum generation is reported") {
  const physics::RiemannIC ic{{1.0, -10.0, 0.4}, {1.0, 10.0, 0.4}, 0.5};
  CHECK_THROWS_AS(physics::ExactRiemannSolver(ic, 1.4), NumericalError);
}

}  // TEST_SUITE

#pragma once

#include "decmdp/physics/euler.hpp"

namespace decmdp::physics {

struct RiemannIC {
  Primitive left;
  Primitive right;
  double diaphragm = 0.5;

  /// Throws ConfigError unless both states have rho > 0 and p > 0.
  void validate() const;
};

/// Exact solution of the Euler Riemann problem for a gamma-law gas.
/// Star pressure comes from a Newton solve of the pressure function started
/// from the two-rarefaction estimate.
class ExactRiemannSolver {
 public:
  static constexpr double kRelativeTolerance = 1e-10;
  static constexpr int kMaxIterations = 100;

  /// Throws NumericalError on vacuum generation or non-convergence.
  ExactRiemannSolver(const RiemannIC& ic, double gamma);

  double star_pressure() const noexcept { return p_star_; }
  double star_velocity() const noexcept { return u_star_; }
  int iterations() const noexcept { return iterations_; }

  bool left_is_shock() const noexcept { return p_star_ > ic_.left.p; }
  bool right_is_shock() const noexcept { return p_star_ > ic_.right.p; }
  /// Meaningful only when the corresponding wave is a shock.
  double left_shock_speed() const;
  double right_shock_speed() const;
  /// Density just behind each wave (left-star / right-star).
  double left_star_density() const;
  double right_star_density() const;

  /// Primitive state at similarity coordinate xi = (x - x_d) / t.
  Primitive sample(double xi) const;

  /// Primitive state at (x, t); t == 0 returns the initial data.
  Primitive at(double x, double t) const;

  const RiemannIC& ic() const noexcept { return ic_; }
  double gamma() const noexcept { return gamma_; }

 private:
  RiemannIC ic_;
  double gamma_;
  double c_left_;
  double c_right_;
  double p_star_ = 0.0;
  double u_star_ = 0.0;
  int iterations_ = 0;
};

/// Convenience wrapper: one-off sample at xi.
Primitive exact_riemann_euler(const RiemannIC& ic, double gamma, double xi);

struct BurgersRiemannIC {
  double left = 0.0;
  double right = 1.0;
  double diaphragm = 0.5;
};

/// Entropy solution of u_t + (u^2/2)_x = 0 for Riemann data: a centred fan
/// when left < right, otherwise a shock moving at (left + right) / 2.
double burgers_exact(const BurgersRiemannIC& ic, double x, double t);

}  // namespace decmdp::physics

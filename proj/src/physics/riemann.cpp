#include "decmdp/physics/riemann.hpp"

#include <cmath>
#include <string>

namespace decmdp::physics {

namespace {

struct PressureFunction {
  double value;
  double derivative;
};

// Left or right contribution f_K(p) to the pressure function.
PressureFunction pressure_branch(double p, const Primitive& w, double c, double gamma) {
  if (p > w.p) {
    const double a = 2.0 / ((gamma + 1.0) * w.rho);
    const double b = (gamma - 1.0) / (gamma + 1.0) * w.p;
    const double q = std::sqrt(a / (b + p));
    return {(p - w.p) * q, q * (1.0 - 0.5 * (p - w.p) / (b + p))};
  }
  const double ratio = p / w.p;
  const double value = 2.0 * c / (gamma - 1.0) * (std::pow(ratio, (gamma - 1.0) / (2.0 * gamma)) - 1.0);
  const double derivative = 1.0 / (w.rho * c) * std::pow(ratio, -(gamma + 1.0) / (2.0 * gamma));
  return {value, derivative};
}

}  // namespace

void RiemannIC::validate() const {
  if (!(left.rho > 0.0 && left.p > 0.0 && right.rho > 0.0 && right.p > 0.0)) {
    throw ConfigError("Riemann initial data must have positive density and pressure");
  }
}

ExactRiemannSolver::ExactRiemannSolver(const RiemannIC& ic, double gamma)
    : ic_(ic),
      gamma_(gamma),
      c_left_(sound_speed(ic.left.rho, ic.left.p, gamma)),
      c_right_(sound_speed(ic.right.rho, ic.right.p, gamma)) {
  ic_.validate();
  const Primitive& wl = ic_.left;
  const Primitive& wr = ic_.right;
  const double du = wr.u - wl.u;
  if (2.0 / (gamma - 1.0) * (c_left_ + c_right_) <= du) {
    throw NumericalError("exact Riemann: initial data generate vacuum");
  }

  const double z = (gamma - 1.0) / (2.0 * gamma);
  double p = std::pow((c_left_ + c_right_ - 0.5 * (gamma - 1.0) * du) /
                          (c_left_ / std::pow(wl.p, z) + c_right_ / std::pow(wr.p, z)),
                      1.0 / z);
  const double p_floor = 1e-14 * std::min(wl.p, wr.p);
  if (!(p > p_floor)) p = p_floor;

  bool converged = false;
  for (iterations_ = 1; iterations_ <= kMaxIterations; ++iterations_) {
    const PressureFunction fl = pressure_branch(p, wl, c_left_, gamma);
    const PressureFunction fr = pressure_branch(p, wr, c_right_, gamma);
    double next = p - (fl.value + fr.value + du) / (fl.derivative + fr.derivative);
    if (next < p_floor) next = p_floor;
    const double change = 2.0 * std::fabs(next - p) / (next + p);
    p = next;
    if (change < kRelativeTolerance) {
      converged = true;
      break;
    }
  }
  if (!converged) throw NumericalError("exact Riemann: pressure iteration did not converge");

  p_star_ = p;
  const PressureFunction fl = pressure_branch(p, wl, c_left_, gamma);
  const PressureFunction fr = pressure_branch(p, wr, c_right_, gamma);
  u_star_ = 0.5 * (wl.u + wr.u) + 0.5 * (fr.value - fl.value);
}

double ExactRiemannSolver::left_shock_speed() const {
  const double g = gamma_;
  const Primitive& w = ic_.left;
  return w.u - c_left_ * std::sqrt((g + 1.0) / (2.0 * g) * p_star_ / w.p + (g - 1.0) / (2.0 * g));
}

double ExactRiemannSolver::right_shock_speed() const {
  const double g = gamma_;
  const Primitive& w = ic_.right;
  return w.u + c_right_ * std::sqrt((g + 1.0) / (2.0 * g) * p_star_ / w.p + (g - 1.0) / (2.0 * g));
}

double ExactRiemannSolver::left_star_density() const {
  const double g = gamma_;
  const Primitive& w = ic_.left;
  const double ratio = p_star_ / w.p;
  if (left_is_shock()) {
    const double k = (g - 1.0) / (g + 1.0);
    return w.rho * (ratio + k) / (k * ratio + 1.0);
  }
  return w.rho * std::pow(ratio, 1.0 / g);
}

double ExactRiemannSolver::right_star_density() const {
  const double g = gamma_;
  const Primitive& w = ic_.right;
  const double ratio = p_star_ / w.p;
  if (right_is_shock()) {
    const double k = (g - 1.0) / (g + 1.0);
    return w.rho * (ratio + k) / (k * ratio + 1.0);
  }
  return w.rho * std::pow(ratio, 1.0 / g);
}

Primitive ExactRiemannSolver::sample(double xi) const {
  const double g = gamma_;
  const Primitive& wl = ic_.left;
  const Primitive& wr = ic_.right;

  if (xi <= u_star_) {
    if (left_is_shock()) {
      if (xi <= left_shock_speed()) return wl;
      return {left_star_density(), u_star_, p_star_};
    }
    const double head = wl.u - c_left_;
    const double c_star = c_left_ * std::pow(p_star_ / wl.p, (g - 1.0) / (2.0 * g));
    const double tail = u_star_ - c_star;
    if (xi <= head) return wl;
    if (xi >= tail) return {left_star_density(), u_star_, p_star_};
    const double c = 2.0 / (g + 1.0) * (c_left_ + 0.5 * (g - 1.0) * (wl.u - xi));
    const double rho = wl.rho * std::pow(c / c_left_, 2.0 / (g - 1.0));
    const double u = 2.0 / (g + 1.0) * (c_left_ + 0.5 * (g - 1.0) * wl.u + xi);
    const double p = wl.p * std::pow(c / c_left_, 2.0 * g / (g - 1.0));
    return {rho, u, p};
  }

  if (right_is_shock()) {
    if (xi >= right_shock_speed()) return wr;
    return {right_star_density(), u_star_, p_star_};
  }
  const double head = wr.u + c_right_;
  const double c_star = c_right_ * std::pow(p_star_ / wr.p, (g - 1.0) / (2.0 * g));
  const double tail = u_star_ + c_star;
  if (xi >= head) return wr;
  if (xi <= tail) return {right_star_density(), u_star_, p_star_};
  const double c = 2.0 / (g + 1.0) * (c_right_ - 0.5 * (g - 1.0) * (wr.u - xi));
  const double rho = wr.rho * std::pow(c / c_right_, 2.0 / (g - 1.0));
  const double u = 2.0 / (g + 1.0) * (-c_right_ + 0.5 * (g - 1.0) * wr.u + xi);
  const double p = wr.p * std::pow(c / c_right_, 2.0 * g / (g - 1.0));
  return {rho, u, p};
}

Primitive ExactRiemannSolver::at(double x, double t) const {
  if (t <= 0.0) return x < ic_.diaphragm ? ic_.left : ic_.right;
  return sample((x - ic_.diaphragm) / t);
}

Primitive exact_riemann_euler(const RiemannIC& ic, double gamma, double xi) {
  return ExactRiemannSolver(ic, gamma).sample(xi);
}

double burgers_exact(const BurgersRiemannIC& ic, double x, double t) {
  const double s = x - ic.diaphragm;
  if (t <= 0.0) return s < 0.0 ? ic.left : ic.right;
  const double xi = s / t;
  if (ic.left < ic.right) {
    if (xi <= ic.left) return ic.left;
    if (xi >= ic.right) return ic.right;
    return xi;
  }
  const double speed = 0.5 * (ic.left + ic.right);
  return xi < speed ? ic.left : ic.right;
}

}  // namespace decmdp::physics

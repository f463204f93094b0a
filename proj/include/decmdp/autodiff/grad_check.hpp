#pragma once

#include <functional>
#include <span>
#include <vector>

#include "decmdp/autodiff/var.hpp"

namespace decmdp::ad {

/// Builds a scalar output on `tape` from leaves placed at the given point.
using TapeFunction = std::function<Var(Tape&, std::span<const Var>)>;

struct GradCheckResult {
  double max_relative_error = 0.0;
  std::vector<double> tape_gradient;
  std::vector<double> fd_gradient;
};

inline constexpr double kGradCheckDivEps = 1e-12;

/// Compares tape gradients against central differences with step h.
/// Relative error per coordinate is |g_tape - g_fd| / (|g_fd| + 1e-12).
GradCheckResult grad_check(const TapeFunction& f, std::span<const double> point, double h);

/// Evaluates f at a point without keeping the tape.
double evaluate(const TapeFunction& f, std::span<const double> point);

}  // namespace decmdp::ad

#pragma once

// Order r = 2 WENO building blocks, generic over `double` and `ad::Var`.
//
// A stencil is always presented upwind-first as (s0, s1, s2): the plus split
// at interface i reads cells (i-2, i-1, i), the minus split reads the mirror
// (i+1, i, i-1). Candidate reconstructions on the two sub-stencils are
//   f0 = -1/2 s0 + 3/2 s1,   f1 = 1/2 s1 + 1/2 s2,
// with smoothness indicators b0 = (s1 - s0)^2, b1 = (s2 - s1)^2 and optimal
// weights d = (1/3, 2/3).

#include <array>

#include "decmdp/autodiff/var.hpp"

namespace decmdp::weno {

struct WenoCoefficients {
  double d0 = 1.0 / 3.0;
  double d1 = 2.0 / 3.0;
  double eps = 1e-6;

  static constexpr double kCandidate0Left = -0.5;
  static constexpr double kCandidate0Right = 1.5;
  static constexpr double kCandidate1 = 0.5;
};

template <class T>
using Pair = std::array<T, 2>;

template <class T>
Pair<T> smoothness_indicators(const T& s0, const T& s1, const T& s2) {
  return {math::square(s1 - s0), math::square(s2 - s1)};
}

template <class T>
Pair<T> candidates(const T& s0, const T& s1, const T& s2) {
  return {WenoCoefficients::kCandidate0Left * s0 + WenoCoefficients::kCandidate0Right * s1,
          WenoCoefficients::kCandidate1 * s1 + WenoCoefficients::kCandidate1 * s2};
}

/// omega_k = a_k / (a_0 + a_1), a_k = d_k / (eps + beta_k)^2.
template <class T>
Pair<T> weno_weights(const Pair<T>& beta, const WenoCoefficients& c) {
  const T a0 = c.d0 / math::square(c.eps + beta[0]);
  const T a1 = c.d1 / math::square(c.eps + beta[1]);
  const T sum = a0 + a1;
  return {a0 / sum, a1 / sum};
}

template <class T>
Pair<T> weno_weights(const T& s0, const T& s1, const T& s2, const WenoCoefficients& c) {
  return weno_weights(smoothness_indicators(s0, s1, s2), c);
}

template <class T>
T combine(const Pair<T>& cand, const Pair<T>& w) {
  return w[0] * cand[0] + w[1] * cand[1];
}

/// One-sign reconstruction with externally supplied weights.
template <class T>
T reconstruct(const T& s0, const T& s1, const T& s2, const Pair<T>& w) {
  return combine(candidates(s0, s1, s2), w);
}

}  // namespace decmdp::weno

#pragma once

// Per-agent network evaluation, generic over double / ad::Var. The scalar
// SIMD reference kernel and the fully taped route both call forward_item, so
// the summation order is defined in exactly one place:
//   acc = bias; acc = acc + w_k * x_k for k ascending.

#include <array>

#include "decmdp/autodiff/var.hpp"
#include "decmdp/policy/layout.hpp"

namespace decmdp::policy {

/// Max-subtracted two-way softmax; ties pick the first logit as the max.
template <class T>
std::array<T, 2> softmax2(const T& l0, const T& l1) {
  const T m = math::max(l0, l1);
  const T e0 = math::exp(l0 - m);
  const T e1 = math::exp(l1 - m);
  const T s = e0 + e1;
  return {e0 / s, e1 / s};
}

template <class T>
std::array<T, kOutputs> forward_item(const T* p, const T* x) {
  std::array<T, kHidden> h1;
  std::array<T, kHidden> h2;
  for (std::size_t o = 0; o < kHidden; ++o) {
    T acc = p[kB1 + o];
    for (std::size_t k = 0; k < kInputs; ++k) acc = acc + p[kW1 + o * kInputs + k] * x[k];
    h1[o] = math::relu(acc);
  }
  for (std::size_t o = 0; o < kHidden; ++o) {
    T acc = p[kB2 + o];
    for (std::size_t k = 0; k < kHidden; ++k) acc = acc + p[kW2 + o * kHidden + k] * h1[k];
    h2[o] = math::relu(acc);
  }
  std::array<T, kOutputs> logits;
  for (std::size_t c = 0; c < kOutputs; ++c) {
    T acc = p[kB3 + c];
    for (std::size_t k = 0; k < kHidden; ++k) acc = acc + p[kW3 + c * kHidden + k] * h2[k];
    logits[c] = acc;
  }
  return softmax2(logits[0], logits[1]);
}

}  // namespace decmdp::policy

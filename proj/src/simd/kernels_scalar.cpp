#include <array>
#include <cmath>

#include "decmdp/policy/network.hpp"
#include "decmdp/simd/kernels.hpp"

namespace decmdp::simd::scalar {

using namespace decmdp::policy;

void weno_fluxes(const WenoFluxArgs& a) {
  const weno::WenoCoefficients& c = a.coeffs;
  for (std::size_t i = 0; i < a.interfaces; ++i) {
    const double* p = a.plus + i;
    const double* m = a.minus + i;
    const auto wp = weno::weno_weights(p[0], p[1], p[2], c);
    const auto wm = weno::weno_weights(m[3], m[2], m[1], c);
    const double fp = weno::reconstruct(p[0], p[1], p[2], wp);
    const double fm = weno::reconstruct(m[3], m[2], m[1], wm);
    a.flux[i] = fp + fm;
    if (a.weights != nullptr) {
      a.weights[4 * i + 0] = wp[0];
      a.weights[4 * i + 1] = wp[1];
      a.weights[4 * i + 2] = wm[0];
      a.weights[4 * i + 3] = wm[1];
    }
  }
}

void mlp_forward(const MlpForwardArgs& a) {
  for (std::size_t b = 0; b < a.batch; ++b) {
    const auto w = forward_item<double>(a.params, a.inputs + kInputs * b);
    a.outputs[kOutputs * b + 0] = w[0];
    a.outputs[kOutputs * b + 1] = w[1];
  }
}

void mlp_backward(const MlpBackwardArgs& a) {
  const double* p = a.params;
  double* g = a.param_grad;
  std::array<double, kHidden> h1;
  std::array<double, kHidden> h2;
  std::array<double, kHidden> dz1;
  std::array<double, kHidden> dz2;

  for (std::size_t b = 0; b < a.batch; ++b) {
    const double* x = a.inputs + kInputs * b;
    for (std::size_t o = 0; o < kHidden; ++o) {
      double acc = p[kB1 + o];
      for (std::size_t k = 0; k < kInputs; ++k) acc = acc + p[kW1 + o * kInputs + k] * x[k];
      h1[o] = acc > 0.0 ? acc : 0.0;
    }
    for (std::size_t o = 0; o < kHidden; ++o) {
      double acc = p[kB2 + o];
      for (std::size_t k = 0; k < kHidden; ++k) acc = acc + p[kW2 + o * kHidden + k] * h1[k];
      h2[o] = acc > 0.0 ? acc : 0.0;
    }
    std::array<double, kOutputs> logits;
    for (std::size_t c = 0; c < kOutputs; ++c) {
      double acc = p[kB3 + c];
      for (std::size_t k = 0; k < kHidden; ++k) acc = acc + p[kW3 + c * kHidden + k] * h2[k];
      logits[c] = acc;
    }
    const auto w = softmax2(logits[0], logits[1]);

    const double g0 = a.upstream[kOutputs * b + 0];
    const double g1 = a.upstream[kOutputs * b + 1];
    const double s = w[0] * g0 + w[1] * g1;
    const std::array<double, kOutputs> dl = {w[0] * (g0 - s), w[1] * (g1 - s)};

    for (std::size_t c = 0; c < kOutputs; ++c) {
      for (std::size_t k = 0; k < kHidden; ++k) g[kW3 + c * kHidden + k] += dl[c] * h2[k];
      g[kB3 + c] += dl[c];
    }
    for (std::size_t k = 0; k < kHidden; ++k) {
      const double dh = p[kW3 + k] * dl[0] + p[kW3 + kHidden + k] * dl[1];
      dz2[k] = h2[k] > 0.0 ? dh : 0.0;
    }
    for (std::size_t o = 0; o < kHidden; ++o) {
      for (std::size_t k = 0; k < kHidden; ++k) g[kW2 + o * kHidden + k] += dz2[o] * h1[k];
      g[kB2 + o] += dz2[o];
    }
    for (std::size_t k = 0; k < kHidden; ++k) {
      double acc = 0.0;
      for (std::size_t o = 0; o < kHidden; ++o) acc = acc + p[kW2 + o * kHidden + k] * dz2[o];
      dz1[k] = h1[k] > 0.0 ? acc : 0.0;
    }
    for (std::size_t o = 0; o < kHidden; ++o) {
      for (std::size_t k = 0; k < kInputs; ++k) g[kW1 + o * kInputs + k] += dz1[o] * x[k];
      g[kB1 + o] += dz1[o];
    }
    if (a.input_grad != nullptr) {
      for (std::size_t k = 0; k < kInputs; ++k) {
        double acc = 0.0;
        for (std::size_t o = 0; o < kHidden; ++o) acc = acc + p[kW1 + o * kInputs + k] * dz1[o];
        a.input_grad[kInputs * b + k] = acc;
      }
    }
  }
}

}  // namespace decmdp::simd::scalar

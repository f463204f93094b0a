// Compiled with -mavx2 (and without FMA contraction). Nothing here may call an
// inline function shared with other translation units, otherwise the linker
// could keep this AVX2 instantiation for callers on older CPUs; tails go
// through the out-of-line scalar kernels instead.

#include <immintrin.h>

#include <cmath>

#include "decmdp/policy/layout.hpp"
#include "decmdp/simd/kernels.hpp"

namespace decmdp::simd::avx2 {

using namespace decmdp::policy;

namespace {

constexpr std::size_t kLanes = 4;

inline __m256d sq(__m256d x) { return _mm256_mul_pd(x, x); }

struct Weights {
  __m256d w0;
  __m256d w1;
};

inline Weights weights(__m256d s0, __m256d s1, __m256d s2, __m256d d0, __m256d d1, __m256d eps) {
  const __m256d b0 = sq(_mm256_sub_pd(s1, s0));
  const __m256d b1 = sq(_mm256_sub_pd(s2, s1));
  const __m256d a0 = _mm256_div_pd(d0, sq(_mm256_add_pd(eps, b0)));
  const __m256d a1 = _mm256_div_pd(d1, sq(_mm256_add_pd(eps, b1)));
  const __m256d sum = _mm256_add_pd(a0, a1);
  return {_mm256_div_pd(a0, sum), _mm256_div_pd(a1, sum)};
}

inline __m256d reconstruct(__m256d s0, __m256d s1, __m256d s2, const Weights& w) {
  const __m256d c0 = _mm256_add_pd(_mm256_mul_pd(_mm256_set1_pd(-0.5), s0),
                                   _mm256_mul_pd(_mm256_set1_pd(1.5), s1));
  const __m256d c1 = _mm256_add_pd(_mm256_mul_pd(_mm256_set1_pd(0.5), s1),
                                   _mm256_mul_pd(_mm256_set1_pd(0.5), s2));
  return _mm256_add_pd(_mm256_mul_pd(w.w0, c0), _mm256_mul_pd(w.w1, c1));
}

inline void softmax_lanes(const double* l0, const double* l1, double* w0, double* w1) {
  for (std::size_t lane = 0; lane < kLanes; ++lane) {
    const double m = l0[lane] >= l1[lane] ? l0[lane] : l1[lane];
    const double e0 = std::exp(l0[lane] - m);
    const double e1 = std::exp(l1[lane] - m);
    const double s = e0 + e1;
    w0[lane] = e0 / s;
    w1[lane] = e1 / s;
  }
}

// Forward pass for 4 items; keeps activations for the backward kernel.
struct Block {
  alignas(32) double x[kInputs][kLanes];
  alignas(32) double h1[kHidden][kLanes];
  alignas(32) double h2[kHidden][kLanes];
  alignas(32) double w[kOutputs][kLanes];
};

void forward_block(const double* p, const double* in, Block& blk) {
  for (std::size_t k = 0; k < kInputs; ++k) {
    for (std::size_t lane = 0; lane < kLanes; ++lane) blk.x[k][lane] = in[kInputs * lane + k];
  }
  const __m256d zero = _mm256_setzero_pd();
  __m256d x[kInputs];
  for (std::size_t k = 0; k < kInputs; ++k) x[k] = _mm256_load_pd(blk.x[k]);

  for (std::size_t o = 0; o < kHidden; ++o) {
    __m256d acc = _mm256_set1_pd(p[kB1 + o]);
    for (std::size_t k = 0; k < kInputs; ++k) {
      acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_set1_pd(p[kW1 + o * kInputs + k]), x[k]));
    }
    _mm256_store_pd(blk.h1[o], _mm256_max_pd(acc, zero));
  }

  for (std::size_t o = 0; o < kHidden; o += 4) {
    __m256d acc0 = _mm256_set1_pd(p[kB2 + o + 0]);
    __m256d acc1 = _mm256_set1_pd(p[kB2 + o + 1]);
    __m256d acc2 = _mm256_set1_pd(p[kB2 + o + 2]);
    __m256d acc3 = _mm256_set1_pd(p[kB2 + o + 3]);
    const double* r0 = p + kW2 + (o + 0) * kHidden;
    const double* r1 = p + kW2 + (o + 1) * kHidden;
    const double* r2 = p + kW2 + (o + 2) * kHidden;
    const double* r3 = p + kW2 + (o + 3) * kHidden;
    for (std::size_t k = 0; k < kHidden; ++k) {
      const __m256d h = _mm256_load_pd(blk.h1[k]);
      acc0 = _mm256_add_pd(acc0, _mm256_mul_pd(_mm256_set1_pd(r0[k]), h));
      acc1 = _mm256_add_pd(acc1, _mm256_mul_pd(_mm256_set1_pd(r1[k]), h));
      acc2 = _mm256_add_pd(acc2, _mm256_mul_pd(_mm256_set1_pd(r2[k]), h));
      acc3 = _mm256_add_pd(acc3, _mm256_mul_pd(_mm256_set1_pd(r3[k]), h));
    }
    _mm256_store_pd(blk.h2[o + 0], _mm256_max_pd(acc0, zero));
    _mm256_store_pd(blk.h2[o + 1], _mm256_max_pd(acc1, zero));
    _mm256_store_pd(blk.h2[o + 2], _mm256_max_pd(acc2, zero));
    _mm256_store_pd(blk.h2[o + 3], _mm256_max_pd(acc3, zero));
  }

  alignas(32) double logits[kOutputs][kLanes];
  for (std::size_t c = 0; c < kOutputs; ++c) {
    __m256d acc = _mm256_set1_pd(p[kB3 + c]);
    for (std::size_t k = 0; k < kHidden; ++k) {
      acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_set1_pd(p[kW3 + c * kHidden + k]),
                                             _mm256_load_pd(blk.h2[k])));
    }
    _mm256_store_pd(logits[c], acc);
  }
  softmax_lanes(logits[0], logits[1], blk.w[0], blk.w[1]);
}

}  // namespace

void weno_fluxes(const WenoFluxArgs& a) {
  const __m256d d0 = _mm256_set1_pd(a.coeffs.d0);
  const __m256d d1 = _mm256_set1_pd(a.coeffs.d1);
  const __m256d eps = _mm256_set1_pd(a.coeffs.eps);
  std::size_t i = 0;
  for (; i + kLanes <= a.interfaces; i += kLanes) {
    const __m256d p0 = _mm256_loadu_pd(a.plus + i);
    const __m256d p1 = _mm256_loadu_pd(a.plus + i + 1);
    const __m256d p2 = _mm256_loadu_pd(a.plus + i + 2);
    const __m256d m0 = _mm256_loadu_pd(a.minus + i + 3);
    const __m256d m1 = _mm256_loadu_pd(a.minus + i + 2);
    const __m256d m2 = _mm256_loadu_pd(a.minus + i + 1);
    const Weights wp = weights(p0, p1, p2, d0, d1, eps);
    const Weights wm = weights(m0, m1, m2, d0, d1, eps);
    const __m256d flux = _mm256_add_pd(reconstruct(p0, p1, p2, wp), reconstruct(m0, m1, m2, wm));
    _mm256_storeu_pd(a.flux + i, flux);
    if (a.weights != nullptr) {
      alignas(32) double buf[4][kLanes];
      _mm256_store_pd(buf[0], wp.w0);
      _mm256_store_pd(buf[1], wp.w1);
      _mm256_store_pd(buf[2], wm.w0);
      _mm256_store_pd(buf[3], wm.w1);
      for (std::size_t lane = 0; lane < kLanes; ++lane) {
        for (std::size_t q = 0; q < 4; ++q) a.weights[4 * (i + lane) + q] = buf[q][lane];
      }
    }
  }
  if (i < a.interfaces) {
    WenoFluxArgs tail = a;
    tail.plus = a.plus + i;
    tail.minus = a.minus + i;
    tail.interfaces = a.interfaces - i;
    tail.flux = a.flux + i;
    tail.weights = a.weights != nullptr ? a.weights + 4 * i : nullptr;
    scalar::weno_fluxes(tail);
  }
}

void mlp_forward(const MlpForwardArgs& a) {
  Block blk;
  std::size_t b = 0;
  for (; b + kLanes <= a.batch; b += kLanes) {
    forward_block(a.params, a.inputs + kInputs * b, blk);
    for (std::size_t lane = 0; lane < kLanes; ++lane) {
      a.outputs[kOutputs * (b + lane) + 0] = blk.w[0][lane];
      a.outputs[kOutputs * (b + lane) + 1] = blk.w[1][lane];
    }
  }
  if (b < a.batch) {
    MlpForwardArgs tail = a;
    tail.inputs = a.inputs + kInputs * b;
    tail.outputs = a.outputs + kOutputs * b;
    tail.batch = a.batch - b;
    scalar::mlp_forward(tail);
  }
}

void mlp_backward(const MlpBackwardArgs& a) {
  const double* p = a.params;
  const __m256d zero = _mm256_setzero_pd();
  // Lane contributions are added to each parameter in batch order, matching
  // the scalar reference bit for bit.
  double* g = a.param_grad;
  auto lane_acc = [&](std::size_t idx, __m256d v) {
    alignas(32) double c[kLanes];
    _mm256_store_pd(c, v);
    double sum = g[idx];
    for (std::size_t lane = 0; lane < kLanes; ++lane) sum += c[lane];
    g[idx] = sum;
  };

  Block blk;
  alignas(32) double dz2[kHidden][kLanes];
  alignas(32) double dz1[kHidden][kLanes];
  std::size_t b = 0;
  for (; b + kLanes <= a.batch; b += kLanes) {
    forward_block(p, a.inputs + kInputs * b, blk);

    alignas(32) double g0[kLanes];
    alignas(32) double g1[kLanes];
    for (std::size_t lane = 0; lane < kLanes; ++lane) {
      g0[lane] = a.upstream[kOutputs * (b + lane) + 0];
      g1[lane] = a.upstream[kOutputs * (b + lane) + 1];
    }
    const __m256d w0 = _mm256_load_pd(blk.w[0]);
    const __m256d w1 = _mm256_load_pd(blk.w[1]);
    const __m256d vg0 = _mm256_load_pd(g0);
    const __m256d vg1 = _mm256_load_pd(g1);
    const __m256d s = _mm256_add_pd(_mm256_mul_pd(w0, vg0), _mm256_mul_pd(w1, vg1));
    const __m256d dl0 = _mm256_mul_pd(w0, _mm256_sub_pd(vg0, s));
    const __m256d dl1 = _mm256_mul_pd(w1, _mm256_sub_pd(vg1, s));

    for (std::size_t k = 0; k < kHidden; ++k) {
      const __m256d h = _mm256_load_pd(blk.h2[k]);
      lane_acc(kW3 + k, _mm256_mul_pd(dl0, h));
      lane_acc(kW3 + kHidden + k, _mm256_mul_pd(dl1, h));
    }
    lane_acc(kB3 + 0, dl0);
    lane_acc(kB3 + 1, dl1);

    for (std::size_t k = 0; k < kHidden; ++k) {
      const __m256d dh = _mm256_add_pd(_mm256_mul_pd(_mm256_set1_pd(p[kW3 + k]), dl0),
                                       _mm256_mul_pd(_mm256_set1_pd(p[kW3 + kHidden + k]), dl1));
      const __m256d on = _mm256_cmp_pd(_mm256_load_pd(blk.h2[k]), zero, _CMP_GT_OQ);
      _mm256_store_pd(dz2[k], _mm256_and_pd(on, dh));
    }
    for (std::size_t o = 0; o < kHidden; ++o) {
      const __m256d d = _mm256_load_pd(dz2[o]);
      for (std::size_t k = 0; k < kHidden; ++k) {
        lane_acc(kW2 + o * kHidden + k, _mm256_mul_pd(d, _mm256_load_pd(blk.h1[k])));
      }
      lane_acc(kB2 + o, d);
    }
    for (std::size_t k = 0; k < kHidden; ++k) {
      __m256d sum = zero;
      for (std::size_t o = 0; o < kHidden; ++o) {
        sum = _mm256_add_pd(sum, _mm256_mul_pd(_mm256_set1_pd(p[kW2 + o * kHidden + k]),
                                               _mm256_load_pd(dz2[o])));
      }
      const __m256d on = _mm256_cmp_pd(_mm256_load_pd(blk.h1[k]), zero, _CMP_GT_OQ);
      _mm256_store_pd(dz1[k], _mm256_and_pd(on, sum));
    }
    for (std::size_t o = 0; o < kHidden; ++o) {
      const __m256d d = _mm256_load_pd(dz1[o]);
      for (std::size_t k = 0; k < kInputs; ++k) {
        lane_acc(kW1 + o * kInputs + k, _mm256_mul_pd(d, _mm256_load_pd(blk.x[k])));
      }
      lane_acc(kB1 + o, d);
    }
    if (a.input_grad != nullptr) {
      for (std::size_t k = 0; k < kInputs; ++k) {
        __m256d sum = zero;
        for (std::size_t o = 0; o < kHidden; ++o) {
          sum = _mm256_add_pd(sum, _mm256_mul_pd(_mm256_set1_pd(p[kW1 + o * kInputs + k]),
                                                 _mm256_load_pd(dz1[o])));
        }
        alignas(32) double buf[kLanes];
        _mm256_store_pd(buf, sum);
        for (std::size_t lane = 0; lane < kLanes; ++lane) a.input_grad[kInputs * (b + lane) + k] = buf[lane];
      }
    }
  }

  if (b < a.batch) {
    MlpBackwardArgs tail = a;
    tail.inputs = a.inputs + kInputs * b;
    tail.upstream = a.upstream + kOutputs * b;
    tail.batch = a.batch - b;
    tail.input_grad = a.input_grad != nullptr ? a.input_grad + kInputs * b : nullptr;
    scalar::mlp_backward(tail);
  }
}

}  // namespace decmdp::simd::avx2

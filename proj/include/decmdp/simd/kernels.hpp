#pragma once

// Data-parallel inner loops with a scalar reference and an AVX2 variant.
// The variant is chosen at runtime (CPU detection, overridable through the
// WENO_DECMDP_SIMD environment variable or set_active_isa).
//
// Forward kernels perform the same IEEE operations in the same order as the
// scalar reference, so their outputs match bit for bit. Parameter-gradient
// accumulation in the MLP backward kernel sums lanes in a different order
// and agrees only to rounding.

#include <cstddef>
#include <string_view>

#include "decmdp/weno/reconstruction.hpp"

namespace decmdp::simd {

enum class Isa { scalar, avx2 };

std::string_view isa_name(Isa isa);
Isa isa_from_name(std::string_view name);
bool isa_supported(Isa isa);
Isa best_isa();
Isa active_isa();
/// Throws std::invalid_argument when the CPU lacks the requested ISA.
void set_active_isa(Isa isa);

/// Classical WENO interface fluxes for one field. `plus` and `minus` are the
/// ghost-extended split fluxes (interfaces + 3 entries). `weights`, when not
/// null, receives 4 values per interface: plus (w0, w1), minus (w0, w1).
struct WenoFluxArgs {
  const double* plus = nullptr;
  const double* minus = nullptr;
  std::size_t interfaces = 0;
  weno::WenoCoefficients coeffs;
  double* flux = nullptr;
  double* weights = nullptr;
};

void weno_fluxes(const WenoFluxArgs& args);
void weno_fluxes(Isa isa, const WenoFluxArgs& args);

/// Batched policy network. `inputs` is batch x 3 and `outputs` batch x 2,
/// both row-major; `params` follows policy/layout.hpp.
struct MlpForwardArgs {
  const double* params = nullptr;
  const double* inputs = nullptr;
  std::size_t batch = 0;
  double* outputs = nullptr;
};

void mlp_forward(const MlpForwardArgs& args);
void mlp_forward(Isa isa, const MlpForwardArgs& args);

/// Vector-Jacobian product of the batched network. `upstream` holds
/// d(objective)/d(output) (batch x 2). Parameter gradients are added into
/// `param_grad`; input gradients are written to `input_grad` (batch x 3) when
/// not null.
struct MlpBackwardArgs {
  const double* params = nullptr;
  const double* inputs = nullptr;
  const double* upstream = nullptr;
  std::size_t batch = 0;
  double* param_grad = nullptr;
  double* input_grad = nullptr;
};

void mlp_backward(const MlpBackwardArgs& args);
void mlp_backward(Isa isa, const MlpBackwardArgs& args);

namespace scalar {
void weno_fluxes(const WenoFluxArgs& args);
void mlp_forward(const MlpForwardArgs& args);
void mlp_backward(const MlpBackwardArgs& args);
}  // namespace scalar

namespace avx2 {
void weno_fluxes(const WenoFluxArgs& args);
void mlp_forward(const MlpForwardArgs& args);
void mlp_backward(const MlpBackwardArgs& args);
}  // namespace avx2

}  // namespace decmdp::simd

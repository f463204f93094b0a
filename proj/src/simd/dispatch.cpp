#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include "decmdp/simd/kernels.hpp"

namespace decmdp::simd {

namespace {

Isa initial_isa() {
  Isa isa = best_isa();
  if (const char* env = std::getenv("WENO_DECMDP_SIMD"); env != nullptr && *env != '\0') {
    const Isa wanted = isa_from_name(env);
    if (isa_supported(wanted)) isa = wanted;
  }
  return isa;
}

std::atomic<Isa>& active() {
  static std::atomic<Isa> isa{initial_isa()};
  return isa;
}

}  // namespace

std::string_view isa_name(Isa isa) { return isa == Isa::avx2 ? "avx2" : "scalar"; }

Isa isa_from_name(std::string_view name) {
  if (name == "scalar") return Isa::scalar;
  if (name == "avx2") return Isa::avx2;
  throw std::invalid_argument("unknown SIMD variant '" + std::string(name) + "'");
}

bool isa_supported(Isa isa) {
  if (isa == Isa::scalar) return true;
#if defined(DECMDP_HAVE_AVX2_KERNELS) && (defined(__x86_64__) || defined(__i386__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") != 0;
#else
  return false;
#endif
}

Isa best_isa() { return isa_supported(Isa::avx2) ? Isa::avx2 : Isa::scalar; }

Isa active_isa() { return active().load(std::memory_order_relaxed); }

void set_active_isa(Isa isa) {
  if (!isa_supported(isa)) {
    throw std::invalid_argument("SIMD variant '" + std::string(isa_name(isa)) + "' not supported here");
  }
  active().store(isa, std::memory_order_relaxed);
}

void weno_fluxes(const WenoFluxArgs& args) { weno_fluxes(active_isa(), args); }
void mlp_forward(const MlpForwardArgs& args) { mlp_forward(active_isa(), args); }
void mlp_backward(const MlpBackwardArgs& args) { mlp_backward(active_isa(), args); }

#if defined(DECMDP_HAVE_AVX2_KERNELS)
void weno_fluxes(Isa isa, const WenoFluxArgs& args) {
  isa == Isa::avx2 ? avx2::weno_fluxes(args) : scalar::weno_fluxes(args);
}
void mlp_forward(Isa isa, const MlpForwardArgs& args) {
  isa == Isa::avx2 ? avx2::mlp_forward(args) : scalar::mlp_forward(args);
}
void mlp_backward(Isa isa, const MlpBackwardArgs& args) {
  isa == Isa::avx2 ? avx2::mlp_backward(args) : scalar::mlp_backward(args);
}
#else
void weno_fluxes(Isa, const WenoFluxArgs& args) { scalar::weno_fluxes(args); }
void mlp_forward(Isa, const MlpForwardArgs& args) { scalar::mlp_forward(args); }
void mlp_backward(Isa, const MlpBackwardArgs& args) { scalar::mlp_backward(args); }
#endif

}  // namespace decmdp::simd

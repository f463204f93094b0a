#include <cstring>
#include <random>
#include <vector>

#include "decmdp/policy/layout.hpp"
#include "decmdp/policy/policy.hpp"
#include "decmdp/simd/kernels.hpp"
#include "doctest.h"

using namespace decmdp;

namespace {

bool bitwise_equal(const std::vector<double>& a, const std::vector<double>& b) {
  return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

std::vector<double> random_values(std::size_t n, std::uint64_t seed, double scale) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> d(0.0, scale);
  std::vector<double> v(n);
  for (auto& x : v) x = d(rng);
  return v;
}

}  // namespace

TEST_SUITE("simd") {

TEST_CASE("names") {
  CHECK(simd::isa_from_name("scalar") == simd::Isa::scalar);
  CHECK(simd::isa_from_name(simd::isa_name(simd::Isa::avx2)) == simd::Isa::avx2);
  CHECK(simd::isa_supported(simd::Isa::scalar));
  CHECK(simd::isa_supported(simd::best_isa()));
}

TEST_CASE("AVX2 kernels agree bit for bit with the scalar reference") {
  if (!simd::isa_supported(simd::Isa::avx2)) {
    MESSAGE("AVX2 not available on this machine; only the scalar path is exercised");
    return;
  }
  // Odd sizes exercise the remainder loops.
  for (std::size_t interfaces : {1u, 4u, 7u, 33u}) {
    const std::size_t ext = interfaces + 4;
    const auto plus = random_values(ext, interfaces, 1.0);
    const auto minus = random_values(ext, interfaces + 100, 1.0);
    std::vector<double> f0(interfaces), f1(interfaces), w0(interfaces * 4), w1(interfaces * 4);
    simd::WenoFluxArgs a;
    a.plus = plus.data();
    a.minus = minus.data();
    a.interfaces = interfaces;
    a.flux = f0.data();
    a.weights = w0.data();
    simd::weno_fluxes(simd::Isa::scalar, a);
    a.flux = f1.data();
    a.weights = w1.data();
    simd::weno_fluxes(simd::Isa::avx2, a);
    CHECK(bitwise_equal(f0, f1));
    CHECK(bitwise_equal(w0, w1));
  }
  const policy::PolicyParams p = policy::init_params(21);
  for (std::size_t batch : {1u, 3u, 8u, 61u}) {
    const auto inputs = random_values(batch * policy::kInputs, batch, 0.7);
    std::vector<double> o0(batch * policy::kOutputs), o1(o0.size());
    simd::MlpForwardArgs f;
    f.params = p.values.data();
    f.inputs = inputs.data();
    f.batch = batch;
    f.outputs = o0.data();
    simd::mlp_forward(simd::Isa::scalar, f);
    f.outputs = o1.data();
    simd::mlp_forward(simd::Isa::avx2, f);
    CHECK(bitwise_equal(o0, o1));

    const auto upstream = random_values(batch * policy::kOutputs, batch + 7, 1.0);
    std::vector<double> pg0(policy::kParamCount, 0.0), pg1(pg0), ig0(inputs.size()), ig1(inputs.size());
    simd::MlpBackwardArgs b;
    b.params = p.values.data();
    b.inputs = inputs.data();
    b.upstream = upstream.data();
    b.batch = batch;
    b.param_grad = pg0.data();
    b.input_grad = ig0.data();
    simd::mlp_backward(simd::Isa::scalar, b);
    b.param_grad = pg1.data();
    b.input_grad = ig1.data();
    simd::mlp_backward(simd::Isa::avx2, b);
    CHECK(bitwise_equal(pg0, pg1));
    CHECK(bitwise_equal(ig0, ig1));
  }
}

TEST_CASE("runtime selection") {
  const simd::Isa before = simd::active_isa();
  simd::set_active_isa(simd::Isa::scalar);
  CHECK(simd::active_isa() == simd::Isa::scalar);
  simd::set_active_isa(before);
  CHECK(simd::active_isa() == before);
}

}  // TEST_SUITE

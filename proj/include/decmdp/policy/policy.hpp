#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "decmdp/autodiff/var.hpp"
#include "decmdp/io/keyvalue.hpp"
#include "decmdp/policy/layout.hpp"
#include "decmdp/policy/network.hpp"

namespace decmdp::policy {

/// How a raw stencil becomes the network input.
///   off:     the raw values
///   max_abs: divided by max(|s0|, |s1|, |s2|, 1e-10)
///   shape:   (s0 - s1, s2 - s1) / D with D their Euclidean norm, plus the
///            bounded scale feature c / (D^2 + c), c = 1e-6
enum class InputMode { off, max_abs, shape };

std::string_view input_mode_name(InputMode mode);
/// Accepts off/max-abs/shape and the boolean spellings true (max-abs) / false (off).
InputMode input_mode_from_name(std::string_view name);

/// Shared weights of the per-agent network, flat in the order of layout.hpp.
struct PolicyParams {
  std::vector<double> values = std::vector<double>(kParamCount, 0.0);
  InputMode input = InputMode::shape;

  std::span<double> w1() { return std::span<double>(values).subspan(kW1, kB1 - kW1); }
  std::span<double> b1() { return std::span<double>(values).subspan(kB1, kHidden); }
  std::span<double> w2() { return std::span<double>(values).subspan(kW2, kB2 - kW2); }
  std::span<double> b2() { return std::span<double>(values).subspan(kB2, kHidden); }
  std::span<double> w3() { return std::span<double>(values).subspan(kW3, kB3 - kW3); }
  std::span<double> b3() { return std::span<double>(values).subspan(kB3, kOutputs); }

  /// Throws ConfigError on wrong size or non-finite entries.
  void validate() const;

  friend bool operator==(const PolicyParams&, const PolicyParams&) = default;
};

/// Glorot-uniform weights in +-sqrt(6 / (fan_in + fan_out)), zero biases.
/// Uses its own bit-level uniform sampler so a seed maps to the same
/// parameters on every platform.
PolicyParams init_params(std::uint64_t seed, InputMode input = InputMode::shape);

inline constexpr double kNormalizeFloor = 1e-10;

/// A stencil prepared for the network; `scale` is 1 when normalization is off.
template <class T>
struct StencilInput {
  std::array<T, kInputs> x;
  T scale;
};

/// Divides by max(|s0|, |s1|, |s2|, 1e-10).
template <class T>
StencilInput<T> normalize_stencil(const T& s0, const T& s1, const T& s2) {
  const T m = math::max(math::max(math::max(math::abs(s0), math::abs(s1)), math::abs(s2)), kNormalizeFloor);
  return {{s0 / m, s1 / m, s2 / m}, m};
}

inline StencilInput<double> normalize_stencil(std::span<const double, 3> raw) {
  return normalize_stencil(raw[0], raw[1], raw[2]);
}

inline constexpr double kShapeScale = 1e-6;

/// Shape features; `scale` is D = sqrt(a^2 + b^2 + 1e-20), which keeps the
/// map smooth (a max would put a kink wherever |a| and |b| swap).
template <class T>
StencilInput<T> shape_stencil(const T& s0, const T& s1, const T& s2) {
  const T a = s0 - s1;
  const T b = s2 - s1;
  const T d2 = math::square(a) + math::square(b) + kNormalizeFloor * kNormalizeFloor;
  const T d = math::sqrt(d2);
  return {{a / d, b / d, kShapeScale / (d2 + kShapeScale)}, d};
}

template <class T>
std::array<T, kInputs> prepare_input(InputMode mode, const T& s0, const T& s1, const T& s2) {
  switch (mode) {
    case InputMode::max_abs: return normalize_stencil(s0, s1, s2).x;
    case InputMode::shape: return shape_stencil(s0, s1, s2).x;
    case InputMode::off: break;
  }
  return {s0, s1, s2};
}

/// Two convex weights for one stencil (already normalized if applicable).
/// Throws ConfigError when parameters or inputs are not finite.
std::array<double, kOutputs> policy_forward(const PolicyParams& params, const StencilInput<double>& input);

/// Raw stencils (batch x 3, upwind first) -> weights (batch x 2), applying
/// the params' input mode. Uses the active SIMD kernel.
void policy_forward_batch(const PolicyParams& params, std::span<const double> raw_stencils,
                          std::span<double> weights);

/// Prepares network inputs (batch x 3) from raw stencils per params.input.
void prepare_inputs(const PolicyParams& params, std::span<const double> raw_stencils,
                    std::span<double> inputs);

// ---------------------------------------------------------------------------
// Checkpoints

inline constexpr int kCheckpointVersion = 1;

struct Checkpoint {
  PolicyParams params;
  io::KeyValue config_echo;  // training configuration, stored as config.<key>
};

std::string checkpoint_to_string(const Checkpoint& ck);
/// Throws ConfigError on a version mismatch, shape mismatch or bad numbers.
Checkpoint checkpoint_from_string(std::string_view text, std::string_view origin = "<string>");
void save_checkpoint(const Checkpoint& ck, const std::filesystem::path& path);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace decmdp::policy

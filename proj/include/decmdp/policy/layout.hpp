#pragma once

#include <cstddef>

namespace decmdp::policy {

// 3 -> 64 -> 64 -> 2 network. Parameters live in one flat array:
// W1 (64x3, row-major), b1, W2 (64x64), b2, W3 (2x64), b3.
inline constexpr std::size_t kInputs = 3;
inline constexpr std::size_t kHidden = 64;
inline constexpr std::size_t kOutputs = 2;

inline constexpr std::size_t kW1 = 0;
inline constexpr std::size_t kB1 = kW1 + kHidden * kInputs;
inline constexpr std::size_t kW2 = kB1 + kHidden;
inline constexpr std::size_t kB2 = kW2 + kHidden * kHidden;
inline constexpr std::size_t kW3 = kB2 + kHidden;
inline constexpr std::size_t kB3 = kW3 + kOutputs * kHidden;
inline constexpr std::size_t kParamCount = kB3 + kOutputs;

}  // namespace decmdp::policy

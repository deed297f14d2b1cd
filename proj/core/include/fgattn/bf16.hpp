// Copyright 2026 The fgattn Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <bit>
#include <cstdint>
#include <span>
#include <vector>

#include "fgattn/config.hpp"

namespace fgattn {

// Rounds to the nearest bfloat16 (ties to even) and widens back to f32.
// Infinities pass through; NaNs stay NaN (quieted).
inline float round_bf16(float x) {
  std::uint32_t bits = std::bit_cast<std::uint32_t>(x);
  if ((bits & 0x7f800000u) == 0x7f800000u) {
    if (bits & 0x007fffffu) bits |= 0x00400000u;  // quiet NaN
    return std::bit_cast<float>(bits & 0xffff0000u);
  }
  const std::uint32_t lsb = (bits >> 16) & 1u;
  bits += 0x7fffu + lsb;
  return std::bit_cast<float>(bits & 0xffff0000u);
}

std::vector<float> round_bf16(std::span<const float> values);

// Applies the precision mode to a score or an ingested element.
inline float quantize(float x, Precision p) {
  return p == Precision::kBf16 ? round_bf16(x) : x;
}

}  // namespace fgattn

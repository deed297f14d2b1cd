// Copyright 2026 The fgattn Authors
// SPDX-License-Identifier: Apache-2.0

#include "fgattn/bf16.hpp"

namespace fgattn {

std::vector<float> round_bf16(std::span<const float> values) {
  std::vector<float> out(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) out[i] = round_bf16(values[i]);
  return out;
}

}  // namespace fgattn

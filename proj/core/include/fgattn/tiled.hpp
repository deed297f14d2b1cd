// Copyright 2026 The fgattn Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "fgattn/config.hpp"
#include "fgattn/tensor.hpp"
#include "fgattn/trace.hpp"

namespace fgattn {

/// Streaming softmax state for a block of query rows.
///
/// Holds the running row max, the running denominator and an accumulator
/// rescaled to the current max, so acc / denom is the exact attention output
/// over every key seen so far.
struct OnlineSoftmaxState {
  std::size_t rows = 0;
  std::size_t dim = 0;
  std::vector<float> running_max;    // -inf until a finite score arrives
  std::vector<float> running_denom;  // sum of exp(score - running_max)
  std::vector<float> acc;            // rows x dim

  OnlineSoftmaxState() = default;
  OnlineSoftmaxState(std::size_t rows, std::size_t dim);

  // In-place form of online_softmax_update.
  void update(std::span<const float> scores, std::span<const float> values,
              std::size_t tile_len);

  // acc / denom, rows x dim. Rows that never saw a finite score throw NumericError.
  std::vector<float> finalize() const;
};

// Folds one tile of already-scaled scores (rows x tile_len, row-major) and
// the matching value rows (tile_len x dim) into the state.
OnlineSoftmaxState online_softmax_update(OnlineSoftmaxState state, std::span<const float> scores,
                                         std::span<const float> values, std::size_t tile_len);

// Tiled attention: query blocks and key tiles of cfg.group_size, online
// softmax across key tiles. Appends (load, compute) events to `trace` when given.
AttnTensor flash_attention(const AttnTensor& q, const AttnTensor& k, const AttnTensor& v,
                           const AttnConfig& cfg, ExecutionTrace* trace = nullptr);

// Same kernel with an arbitrary key-tile width (tiling-invariance studies).
AttnTensor flash_attention(const AttnTensor& q, const AttnTensor& k, const AttnTensor& v,
                           const AttnConfig& cfg, std::size_t key_tile,
                           ExecutionTrace* trace = nullptr);

// The event sequence flash_attention emits for cfg, without running it.
ExecutionTrace dense_schedule(const AttnConfig& cfg);

}  // namespace fgattn

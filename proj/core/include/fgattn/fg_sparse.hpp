// Copyright 2026 The fgattn Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>

#include "fgattn/config.hpp"
#include "fgattn/sparse_mask.hpp"
#include "fgattn/tensor.hpp"
#include "fgattn/trace.hpp"

namespace fgattn {

// Slice-granular sparse attention. For each query group the listed keys are
// processed in chunks of at most cfg.group_size: K and V rows are gathered
// with the same indices into packed tiles and folded through the online
// softmax. The last chunk may be short; it is never padded.
AttnTensor fg_sparse_attention(const AttnTensor& q, const AttnTensor& k, const AttnTensor& v,
                               const SparseIndexMask& mask, const AttnConfig& cfg,
                               ExecutionTrace* trace = nullptr);

// Explicit chunk width, 1 <= chunk <= cfg.group_size.
AttnTensor fg_sparse_attention(const AttnTensor& q, const AttnTensor& k, const AttnTensor& v,
                               const SparseIndexMask& mask, const AttnConfig& cfg,
                               std::size_t chunk, ExecutionTrace* trace = nullptr);

// The (gather, compute) events fg_sparse_attention emits, without running it.
ExecutionTrace sparse_schedule(const AttnConfig& cfg, const SparseIndexMask& mask);

}  // namespace fgattn

// Copyright 2026 The fgattn Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "fgattn/config.hpp"
#include "fgattn/sparse_mask.hpp"
#include "fgattn/tensor.hpp"

namespace fgattn {

// Reference attention. These materialize full score rows and are the ground
// truth for the tiled and sparse kernels.

// O = softmax(Q K^T * scale) V per (batch, head).
AttnTensor dense_attention(const AttnTensor& q, const AttnTensor& k, const AttnTensor& v,
                           const AttnConfig& cfg);

// softmax(Q K^T * scale), rows sum to one.
AttnMap attention_map(const AttnTensor& q, const AttnTensor& k, const AttnConfig& cfg);

// Softmax restricted to the keys listed for each query group, renormalized
// over that subset. A full mask reproduces dense_attention bit for bit.
AttnTensor masked_dense_attention(const AttnTensor& q, const AttnTensor& k, const AttnTensor& v,
                                  const SparseIndexMask& mask, const AttnConfig& cfg);

}  // namespace fgattn

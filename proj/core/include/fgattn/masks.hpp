// Copyright 2026 The fgattn Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <string_view>

#include "fgattn/config.hpp"
#include "fgattn/sparse_mask.hpp"
#include "fgattn/tensor.hpp"

namespace fgattn {

enum class MaskStrategy {
  kCachedThreshold,    // threshold a full attention map from a calibration pass
  kAvgQueryThreshold,  // threshold exp(k . q_avg * scale) / D
  kAvgQueryTopK,       // keep the top_k keys by the same score
};

std::string_view to_string(MaskStrategy s);
MaskStrategy parse_strategy(std::string_view text);

struct MaskBuilderConfig {
  MaskStrategy strategy = MaskStrategy::kCachedThreshold;
  double tau = 0.0;
  std::size_t top_k = 1;
  std::size_t refresh_interval = 15;

  // Throws std::invalid_argument when tau/top_k/refresh_interval are unusable for seq_len.
  void validate(std::size_t seq_len) const;
};

// Key j is kept for group g iff some query row of g has a_ij >= tau. A group
// that would come out empty keeps its single strongest slice instead.
SparseIndexMask build_mask_cached(const AttnMap& map, const AttnConfig& cfg, double tau);

// Average-query pooling: per group, s_j = exp((k_j . q_avg) * scale) / D.
// Threshold mode keeps s_j >= tau (argmax fallback when empty); top-k mode
// keeps the top_k largest s_j, ties toward the smaller index.
SparseIndexMask build_mask_avg_query(const AttnTensor& q, const AttnTensor& k,
                                     const AttnConfig& cfg, const MaskBuilderConfig& builder);

// Dispatches on builder.strategy. The cached strategy computes the full map
// of (q, k) first.
SparseIndexMask build_mask(const AttnTensor& q, const AttnTensor& k, const AttnConfig& cfg,
                           const MaskBuilderConfig& builder);

struct CachedMaskState {
  SparseIndexMask mask;
  std::size_t built_at_iteration = 0;
  std::size_t refresh_interval = 15;
};

// True when the cached mask is due for a rebuild from a fresh full map.
bool refresh_policy(const CachedMaskState& state, std::size_t iteration);

// Fraction of block x block tiles whose every score is < tau, averaged over
// (batch, head). Edge tiles are judged over their actual extent.
double block_sparsity(const AttnMap& map, std::size_t block, double tau);

// Fraction of M x 1 slices (query group x key) whose every score is < tau.
double slice_sparsity(const AttnMap& map, const AttnConfig& cfg, double tau);

// Parses "0.5/N", "1/N", "/N" or a plain real. `x/N` resolves to x / seq_len.
double parse_threshold(std::string_view text, std::size_t seq_len);

}  // namespace fgattn

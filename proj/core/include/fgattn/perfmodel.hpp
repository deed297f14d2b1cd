// Copyright 2026 The fgattn Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>

#include "fgattn/config.hpp"
#include "fgattn/sparse_mask.hpp"
#include "fgattn/trace.hpp"

namespace fgattn {

// FLOPs charged per attention score for the softmax: running max, subtract,
// exp, denominator add, and the final per-score share of the rescale.
inline constexpr std::uint64_t kSoftmaxFlopsPerScore = 5;
// Mask entries are 32-bit integers.
inline constexpr std::uint64_t kMaskIndexBytes = 4;

struct CostReport {
  std::uint64_t flops_scores = 0;   // Q K^T
  std::uint64_t flops_output = 0;   // P V
  std::uint64_t flops_softmax = 0;
  std::uint64_t bytes_qkv = 0;      // Q read once per group, K/V per loaded key
  std::uint64_t bytes_mask = 0;
  std::uint64_t modeled_cycles = 0;
  double density = 1.0;
  // Dense over sparse, for the pipeline cycles and for FLOPs with and
  // without the softmax term.
  double projected_speedup = 1.0;
  double flop_ratio_matmul = 1.0;
  double flop_ratio_with_softmax = 1.0;

  std::uint64_t flops_matmul() const { return flops_scores + flops_output; }
  std::uint64_t flops_total() const { return flops_matmul() + flops_softmax; }
};

struct PipelineParams {
  std::uint64_t load_cycles = 0;     // L: move one key/value tile on chip
  std::uint64_t compute_cycles = 0;  // C: scores, softmax and P V for one tile
  std::uint64_t addrgen_cycles = 0;  // A: address generation, gathers only
  std::uint64_t pipeline_depth = 1;  // loads allowed ahead of the compute stage

  void validate() const;
};

// Illustrative H100-class profile; see profiles/h100.conf.
PipelineParams default_pipeline_params();

// key = value lines, '#' comments. Keys: load_cycles, compute_cycles,
// addrgen_cycles, pipeline_depth. Missing keys keep their defaults.
PipelineParams parse_pipeline_params(std::string_view text);
PipelineParams load_pipeline_params(const std::string& path);

// Counts for the dense kernel.
CostReport count_flops(const AttnConfig& cfg);
// Counts for the sparse kernel under `mask`.
CostReport count_flops(const AttnConfig& cfg, const SparseIndexMask& mask);

// FLOPs implied by the compute events of a trace (counts only).
CostReport trace_flops(const ExecutionTrace& trace);

// Two-stage producer/consumer schedule. Tile t's load (A + L for gathers,
// L for contiguous loads) may start once the previous load is done and the
// buffer it reuses is free; its compute (C) starts once it is loaded and the
// previous compute is done. Returns the finish time of the last compute.
std::uint64_t simulate_pipeline(const ExecutionTrace& trace, const PipelineParams& params);

// Dense modeled cycles over sparse modeled cycles under the same params.
double projected_speedup(const AttnConfig& cfg, const SparseIndexMask& mask,
                         const PipelineParams& params);

// Full report for the sparse kernel: counts, cycles, density and ratios.
CostReport bench(const AttnConfig& cfg, const SparseIndexMask& mask, const PipelineParams& params);

}  // namespace fgattn

// Copyright 2026 The fgattn Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "fgattn/config.hpp"
#include "fgattn/perfmodel.hpp"
#include "fgattn/tensor.hpp"

namespace fgattn {

struct SweepRow {
  double tau = 0.0;
  double tau_times_n = 0.0;
  double density = 0.0;
  std::uint64_t modeled_cycles = 0;
  double projected_speedup = 0.0;
  double max_abs_error = 0.0;  // sparse output vs dense_attention
};

// Cached-threshold masks at `steps` evenly spaced thresholds in
// [tau_from, tau_to] (both absolute), all built from one full map.
std::vector<SweepRow> threshold_sweep(const AttnTensor& q, const AttnTensor& k,
                                      const AttnTensor& v, const AttnConfig& cfg,
                                      double tau_from, double tau_to, std::size_t steps,
                                      const PipelineParams& params);

// CSV with header tau,tau_times_n,density,modeled_cycles,projected_speedup,max_abs_error.
std::string sweep_csv(const std::vector<SweepRow>& rows);

}  // namespace fgattn

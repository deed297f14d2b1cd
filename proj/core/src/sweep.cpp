// Copyright 2026 The fgattn Authors
// SPDX-License-Identifier: Apache-2.0

#include "fgattn/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "fgattn/fg_sparse.hpp"
#include "fgattn/masks.hpp"
#include "fgattn/oracle.hpp"

namespace fgattn {

std::vector<SweepRow> threshold_sweep(const AttnTensor& q, const AttnTensor& k,
                                      const AttnTensor& v, const AttnConfig& cfg,
                                      double tau_from, double tau_to, std::size_t steps,
                                      const PipelineParams& params) {
  if (steps == 0) throw std::invalid_argument("sweep needs at least one step");
  if (!(tau_from > 0.0) || !(tau_to >= tau_from)) {
    throw std::invalid_argument("sweep needs 0 < tau_from <= tau_to");
  }
  const AttnMap map = attention_map(q, k, cfg);
  const AttnTensor dense = dense_attention(q, k, v, cfg);

  std::vector<SweepRow> rows;
  rows.reserve(steps);
  for (std::size_t s = 0; s < steps; ++s) {
    const double t = steps == 1 ? 0.0 : static_cast<double>(s) / static_cast<double>(steps - 1);
    SweepRow row;
    row.tau = tau_from + (tau_to - tau_from) * t;
    row.tau_times_n = row.tau * static_cast<double>(cfg.seq_len);

    const SparseIndexMask mask = build_mask_cached(map, cfg, row.tau);
    const CostReport cost = bench(cfg, mask, params);
    row.density = cost.density;
    row.modeled_cycles = cost.modeled_cycles;
    row.projected_speedup = cost.projected_speedup;

    const AttnTensor out = fg_sparse_attention(q, k, v, mask, cfg);
    const auto a = out.data();
    const auto b = dense.data();
    for (std::size_t i = 0; i < a.size(); ++i) {
      row.max_abs_error = std::max(row.max_abs_error, std::abs(static_cast<double>(a[i]) - b[i]));
    }
    rows.push_back(row);
  }
  return rows;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::string out = "tau,tau_times_n,density,modeled_cycles,projected_speedup,max_abs_error\n";
  char line[256];
  for (const auto& r : rows) {
    std::snprintf(line, sizeof(line), "%.9e,%.4f,%.9f,%llu,%.6f,%.6e\n", r.tau, r.tau_times_n,
                  r.density, static_cast<unsigned long long>(r.modeled_cycles), r.projected_speedup,
                  r.max_abs_error);
    out += line;
  }
  return out;
}

}  // namespace fgattn

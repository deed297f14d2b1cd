// Copyright 2026 The fgattn Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "fgattn/config.hpp"
#include "fgattn/masks.hpp"
#include "fgattn/tensor.hpp"

namespace fgattn {

struct IterStreamConfig {
  AttnConfig cfg;
  std::size_t iterations = 1;
  double rho = 1.0;
  std::uint64_t seed = 0;

  void validate() const;
};

struct Snapshot {
  AttnTensor q;
  AttnTensor k;
  AttnTensor v;
};

// AR(1) drift: snapshot 0 is gaussian(seed); snapshot t+1 is
// rho * snapshot t + sqrt(1 - rho^2) * fresh gaussian, elementwise.
std::vector<Snapshot> generate_stream(const IterStreamConfig& sc);

struct IterationReport {
  std::size_t iteration = 0;
  bool refreshed = false;
  double density = 0.0;          // cached mask in use
  double fresh_density = 0.0;    // mask rebuilt from this iteration's inputs
  double jaccard = 0.0;          // cached vs fresh
  double max_abs_error = 0.0;    // cached-mask output vs dense_attention
  double fresh_max_abs_error = 0.0;
  bool matches_fresh = false;    // cached output bitwise equal to fresh output
  AttnTensor output;             // cached-mask output
};

// Rebuilds the mask whenever refresh_policy fires (always at iteration 0),
// otherwise reuses it; each iteration is also compared against a freshly
// built mask and against dense attention.
std::vector<IterationReport> run_cached_pipeline(const std::vector<Snapshot>& stream,
                                                 const MaskBuilderConfig& builder,
                                                 const AttnConfig& cfg);

}  // namespace fgattn

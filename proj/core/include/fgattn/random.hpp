// Copyright 2026 The fgattn Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <random>

namespace fgattn {

// Portable standard-normal generator: std::mt19937_64 (whose output
// sequence is fixed by the C++ standard) feeding a Box-Muller transform
// on 53-bit uniforms. std::normal_distribution is avoided because its
// algorithm is implementation-defined.
class GaussianStream {
 public:
  GaussianStream(std::uint64_t seed, std::uint64_t stream);

  double next();

  // Uniform in (0, 1].
  double next_uniform();

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

// Mixes (seed, stream) into one engine seed so that Q, K, V and each
// stream iteration draw from disjoint, reproducible sequences.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace fgattn

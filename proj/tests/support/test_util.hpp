// Copyright 2026 The fgattn Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "fgattn/config.hpp"
#include "fgattn/sparse_mask.hpp"
#include "fgattn/tensor.hpp"
#include "reference.hpp"

namespace fgattn::testing {

inline std::vector<float> to_vec(std::span<const float> s) { return {s.begin(), s.end()}; }

inline ref::Geometry geom(const AttnConfig& cfg) {
  return {cfg.batch, cfg.heads, cfg.seq_len, cfg.head_dim};
}

inline double max_abs_diff(std::span<const float> a, std::span<const float> b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(double(a[i]) - double(b[i])));
  return worst;
}

inline double max_abs_diff(std::span<const float> a, const std::vector<double>& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(double(a[i]) - b[i]));
  return worst;
}

// Random key lists: each key kept with probability `density`, at least one per group.
inline std::vector<std::vector<std::uint32_t>> random_lists(const AttnConfig& cfg, double density,
                                                            std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<std::vector<std::uint32_t>> lists(cfg.batch * cfg.heads * cfg.num_groups());
  for (auto& list : lists) {
    for (std::uint32_t j = 0; j < cfg.seq_len; ++j)
      if (u(rng) < density) list.push_back(j);
    if (list.empty()) list.push_back(static_cast<std::uint32_t>(rng() % cfg.seq_len));
  }
  return lists;
}

inline SparseIndexMask random_mask(const AttnConfig& cfg, double density, std::uint64_t seed) {
  return SparseIndexMask(cfg.batch, cfg.heads, cfg.seq_len, cfg.group_size,
                         random_lists(cfg, density, seed));
}

// Exactly `per_group` keys per group, evenly strided.
inline SparseIndexMask uniform_mask(const AttnConfig& cfg, std::size_t per_group) {
  std::vector<std::vector<std::uint32_t>> lists(cfg.batch * cfg.heads * cfg.num_groups());
  const std::size_t stride = cfg.seq_len / per_group;
  std::size_t slot = 0;
  for (auto& list : lists) {
    for (std::size_t t = 0; t < per_group; ++t)
      list.push_back(static_cast<std::uint32_t>((t * stride + slot) % cfg.seq_len));
    ++slot;
  }
  return SparseIndexMask(cfg.batch, cfg.heads, cfg.seq_len, cfg.group_size, std::move(lists));
}

}  // namespace fgattn::testing

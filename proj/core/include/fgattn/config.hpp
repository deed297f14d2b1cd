// Copyright 2026 The fgattn Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <string_view>

namespace fgattn {

enum class Precision {
  kFull,  // f32 storage and arithmetic
  kBf16,  // Q/K/V and scores rounded to bfloat16, f32 accumulation
};

std::string_view to_string(Precision p);
Precision parse_precision(std::string_view text);

/// Problem geometry shared by every kernel.
///
/// Query rows are split into groups of `group_size` consecutive rows; the
/// last group is short when N is not a multiple of M. Keys are tiled with
/// the same width in the dense kernels.
struct AttnConfig {
  std::size_t batch = 1;
  std::size_t heads = 1;
  std::size_t seq_len = 1;
  std::size_t head_dim = 1;
  std::size_t group_size = 128;
  double scale = 1.0;
  Precision precision = Precision::kFull;

  /// Builds a validated config with scale = 1/sqrt(head_dim).
  static AttnConfig make(std::size_t batch, std::size_t heads, std::size_t seq_len,
                         std::size_t head_dim, std::size_t group_size,
                         Precision precision = Precision::kFull);

  /// Throws ShapeError if any invariant is broken.
  void validate() const;

  std::size_t num_groups() const { return (seq_len + group_size - 1) / group_size; }
  std::size_t group_begin(std::size_t g) const { return g * group_size; }
  std::size_t group_end(std::size_t g) const {
    const std::size_t end = (g + 1) * group_size;
    return end < seq_len ? end : seq_len;
  }
  std::size_t group_rows(std::size_t g) const { return group_end(g) - group_begin(g); }

  static double default_scale(std::size_t head_dim) {
    return 1.0 / std::sqrt(static_cast<double>(head_dim));
  }
};

}  // namespace fgattn

// Copyright 2026 The fgattn Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "fgattn/config.hpp"

namespace fgattn {

/// Slice-granular sparse index mask.
///
/// For every (batch, head, query group) it stores the sorted, distinct key
/// indices whose M x 1 slices are computed. This is the compact (CSR) form
/// of a padded [B, H, G, N] integer array, G = ceil(N / M). Every list holds
/// at least one key.
class SparseIndexMask {
 public:
  SparseIndexMask() = default;

  // `lists` is ordered by (b, h, g) with g fastest. Lists are sorted and
  // deduplicated here. Throws ShapeError on a wrong list count,
  // OutOfRangeError on an index >= seq_len, ContractViolation on an empty list.
  SparseIndexMask(std::size_t batch, std::size_t heads, std::size_t seq_len,
                  std::size_t group_size, std::vector<std::vector<std::uint32_t>> lists);

  // Every key for every group.
  static SparseIndexMask full(const AttnConfig& cfg);

  std::size_t batch() const { return batch_; }
  std::size_t heads() const { return heads_; }
  std::size_t groups() const { return groups_; }
  std::size_t seq_len() const { return seq_len_; }
  std::size_t group_size() const { return group_size_; }

  std::span<const std::uint32_t> keys(std::size_t b, std::size_t h, std::size_t g) const {
    const std::size_t slot = (b * heads_ + h) * groups_ + g;
    return std::span<const std::uint32_t>(indices_).subspan(offsets_[slot],
                                                            offsets_[slot + 1] - offsets_[slot]);
  }
  std::size_t total_entries() const { return indices_.size(); }
  std::size_t num_lists() const { return offsets_.empty() ? 0 : offsets_.size() - 1; }

  // Throws ShapeError unless B, H, N, M agree with cfg.
  void check_compatible(const AttnConfig& cfg) const;

  bool operator==(const SparseIndexMask&) const = default;

 private:
  std::size_t batch_ = 0;
  std::size_t heads_ = 0;
  std::size_t seq_len_ = 0;
  std::size_t group_size_ = 0;
  std::size_t groups_ = 0;
  std::vector<std::size_t> offsets_;
  std::vector<std::uint32_t> indices_;
};

// Retained (group, key) pairs over B*H*G*N; in (0, 1].
double mask_density(const SparseIndexMask& mask);

// |a ∩ b| / |a ∪ b| over (b, h, g, key) entries. Masks must share geometry.
double jaccard(const SparseIndexMask& a, const SparseIndexMask& b);

inline constexpr std::int32_t kPadSentinel = -1;

// Row-major [B, H, G, N] array; each list left-aligned, tail filled with -1.
std::vector<std::int32_t> export_padded(const SparseIndexMask& mask);

SparseIndexMask import_padded(std::span<const std::int32_t> padded, std::size_t batch,
                              std::size_t heads, std::size_t seq_len, std::size_t group_size);

}  // namespace fgattn

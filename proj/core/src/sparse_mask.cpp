// Copyright 2026 The fgattn Authors
// SPDX-License-Identifier: Apache-2.0

#include "fgattn/sparse_mask.hpp"

#include <algorithm>
#include <string>

#include "fgattn/errors.hpp"

namespace fgattn {

SparseIndexMask::SparseIndexMask(std::size_t batch, std::size_t heads, std::size_t seq_len,
                                 std::size_t group_size,
                                 std::vector<std::vector<std::uint32_t>> lists)
    : batch_(batch), heads_(heads), seq_len_(seq_len), group_size_(group_size) {
  if (batch == 0 || heads == 0 || seq_len == 0 || group_size == 0 || group_size > seq_len) {
    throw ShapeError("mask geometry needs B, H, N, M >= 1 and M <= N");
  }
  groups_ = (seq_len + group_size - 1) / group_size;
  if (lists.size() != batch * heads * groups_) {
    throw ShapeError("mask expects " + std::to_string(batch * heads * groups_) + " key lists, got " +
                     std::to_string(lists.size()));
  }
  offsets_.reserve(lists.size() + 1);
  offsets_.push_back(0);
  for (auto& list : lists) {
    std::sort(list.begin(), list.end());
    list.erase(std::unique(list.begin(), list.end()), list.end());
    if (list.empty()) throw ContractViolation("every query group needs at least one key");
    if (list.back() >= seq_len) {
      throw OutOfRangeError("key index " + std::to_string(list.back()) + " >= seq_len " +
                            std::to_string(seq_len));
    }
    indices_.insert(indices_.end(), list.begin(), list.end());
    offsets_.push_back(indices_.size());
  }
}

SparseIndexMask SparseIndexMask::full(const AttnConfig& cfg) {
  cfg.validate();
  std::vector<std::uint32_t> all(cfg.seq_len);
  for (std::size_t j = 0; j < cfg.seq_len; ++j) all[j] = static_cast<std::uint32_t>(j);
  std::vector<std::vector<std::uint32_t>> lists(cfg.batch * cfg.heads * cfg.num_groups(), all);
  return SparseIndexMask(cfg.batch, cfg.heads, cfg.seq_len, cfg.group_size, std::move(lists));
}

void SparseIndexMask::check_compatible(const AttnConfig& cfg) const {
  if (batch_ != cfg.batch || heads_ != cfg.heads || seq_len_ != cfg.seq_len ||
      group_size_ != cfg.group_size) {
    throw ShapeError("mask geometry (B, H, N, M) does not match the attention config");
  }
}

double mask_density(const SparseIndexMask& mask) {
  const double slots = static_cast<double>(mask.num_lists()) * static_cast<double>(mask.seq_len());
  return static_cast<double>(mask.total_entries()) / slots;
}

double jaccard(const SparseIndexMask& a, const SparseIndexMask& b) {
  if (a.batch() != b.batch() || a.heads() != b.heads() || a.seq_len() != b.seq_len() ||
      a.group_size() != b.group_size()) {
    throw ShapeError("jaccard needs masks with identical geometry");
  }
  std::size_t common = 0;
  for (std::size_t bi = 0; bi < a.batch(); ++bi) {
    for (std::size_t h = 0; h < a.heads(); ++h) {
      for (std::size_t g = 0; g < a.groups(); ++g) {
        const auto x = a.keys(bi, h, g);
        const auto y = b.keys(bi, h, g);
        std::size_t i = 0, j = 0;
        while (i < x.size() && j < y.size()) {
          if (x[i] < y[j]) {
            ++i;
          } else if (y[j] < x[i]) {
            ++j;
          } else {
            ++common;
            ++i;
            ++j;
          }
        }
      }
    }
  }
  const std::size_t unite = a.total_entries() + b.total_entries() - common;
  return static_cast<double>(common) / static_cast<double>(unite);
}

std::vector<std::int32_t> export_padded(const SparseIndexMask& mask) {
  const std::size_t n = mask.seq_len();
  std::vector<std::int32_t> padded(mask.num_lists() * n, kPadSentinel);
  std::size_t slot = 0;
  for (std::size_t b = 0; b < mask.batch(); ++b) {
    for (std::size_t h = 0; h < mask.heads(); ++h) {
      for (std::size_t g = 0; g < mask.groups(); ++g, ++slot) {
        const auto keys = mask.keys(b, h, g);
        std::copy(keys.begin(), keys.end(), padded.begin() + static_cast<std::ptrdiff_t>(slot * n));
      }
    }
  }
  return padded;
}

SparseIndexMask import_padded(std::span<const std::int32_t> padded, std::size_t batch,
                              std::size_t heads, std::size_t seq_len, std::size_t group_size) {
  if (group_size == 0 || seq_len == 0) throw ShapeError("padded mask needs N, M >= 1");
  const std::size_t groups = (seq_len + group_size - 1) / group_size;
  if (padded.size() != batch * heads * groups * seq_len) {
    throw ShapeError("padded mask length does not match [B, H, G, N]");
  }
  std::vector<std::vector<std::uint32_t>> lists(batch * heads * groups);
  for (std::size_t slot = 0; slot < lists.size(); ++slot) {
    const auto row = padded.subspan(slot * seq_len, seq_len);
    bool ended = false;
    for (const std::int32_t idx : row) {
      if (idx == kPadSentinel) {
        ended = true;
        continue;
      }
      if (ended || idx < 0) throw ShapeError("padded mask row has entries after the sentinel");
      lists[slot].push_back(static_cast<std::uint32_t>(idx));
    }
  }
  return SparseIndexMask(batch, heads, seq_len, group_size, std::move(lists));
}

}  // namespace fgattn

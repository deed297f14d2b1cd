// Copyright 2026 The fgattn Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace fgattn {

// Contiguous tile assembled from non-contiguous source rows.
struct PackedTile {
  std::size_t dim = 0;
  std::vector<float> rows;                  // source_indices.size() x dim
  std::vector<std::uint32_t> source_indices;

  std::size_t size() const { return source_indices.size(); }
  std::span<const float> row(std::size_t t) const {
    return std::span<const float>(rows).subspan(t * dim, dim);
  }
};

// Copies matrix rows (matrix is n_rows x dim, row-major) in the order given
// by `indices` into a packed tile. Duplicates are copied as-is. Throws
// OutOfRangeError if any index >= n_rows.
PackedTile gather_rows(std::span<const float> matrix, std::size_t n_rows, std::size_t dim,
                       std::span<const std::uint32_t> indices);

// Reuses `tile`'s storage; same semantics as gather_rows.
void gather_rows_into(std::span<const float> matrix, std::size_t n_rows, std::size_t dim,
                      std::span<const std::uint32_t> indices, PackedTile& tile);

}  // namespace fgattn

// Copyright 2026 The fgattn Authors
// SPDX-License-Identifier: Apache-2.0

#include "fgattn/gather.hpp"

#include <algorithm>
#include <string>

#include "fgattn/errors.hpp"

namespace fgattn {

void gather_rows_into(std::span<const float> matrix, std::size_t n_rows, std::size_t dim,
                      std::span<const std::uint32_t> indices, PackedTile& tile) {
  if (matrix.size() != n_rows * dim) throw ShapeError("gather source must be n_rows x dim");
  tile.dim = dim;
  tile.source_indices.assign(indices.begin(), indices.end());
  tile.rows.resize(indices.size() * dim);
  for (std::size_t t = 0; t < indices.size(); ++t) {
    const std::size_t src = indices[t];
    if (src >= n_rows) {
      throw OutOfRangeError("gather index " + std::to_string(src) + " >= " + std::to_string(n_rows));
    }
    std::copy_n(matrix.begin() + static_cast<std::ptrdiff_t>(src * dim), dim,
                tile.rows.begin() + static_cast<std::ptrdiff_t>(t * dim));
  }
}

PackedTile gather_rows(std::span<const float> matrix, std::size_t n_rows, std::size_t dim,
                       std::span<const std::uint32_t> indices) {
  PackedTile tile;
  gather_rows_into(matrix, n_rows, dim, indices, tile);
  return tile;
}

}  // namespace fgattn

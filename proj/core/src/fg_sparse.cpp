// Copyright 2026 The fgattn Authors
// SPDX-License-Identifier: Apache-2.0

#include "fgattn/fg_sparse.hpp"

#include <algorithm>

#include "fgattn/gather.hpp"
#include "fgattn/tiled.hpp"
#include "kernel_common.hpp"

namespace fgattn {

AttnTensor fg_sparse_attention(const AttnTensor& q, const AttnTensor& k, const AttnTensor& v,
                               const SparseIndexMask& mask, const AttnConfig& cfg,
                               ExecutionTrace* trace) {
  return fg_sparse_attention(q, k, v, mask, cfg, cfg.group_size, trace);
}

AttnTensor fg_sparse_attention(const AttnTensor& q, const AttnTensor& k, const AttnTensor& v,
                               const SparseIndexMask& mask, const AttnConfig& cfg,
                               std::size_t chunk, ExecutionTrace* trace) {
  detail::check_qkv(q, k, v, cfg);
  mask.check_compatible(cfg);
  if (chunk == 0 || chunk > cfg.group_size) throw ShapeError("chunk width must be in [1, M]");
  const std::size_t n = cfg.seq_len;
  const std::size_t dim = cfg.head_dim;
  const float scale = static_cast<float>(cfg.scale);
  const detail::Ingested qi(q, cfg.precision), ki(k, cfg.precision), vi(v, cfg.precision);

  if (trace) {
    trace->head_dim = dim;
    trace->events.clear();
    trace->peak_scratch_floats = 0;
  }

  std::vector<float> out(qkv_dims(cfg).size());
  std::vector<float> scores;
  PackedTile k_tile, v_tile;
  for (std::size_t b = 0; b < cfg.batch; ++b) {
    for (std::size_t h = 0; h < cfg.heads; ++h) {
      const auto qh = qi.head(b, h, cfg.heads, n, dim);
      const auto kh = ki.head(b, h, cfg.heads, n, dim);
      const auto vh = vi.head(b, h, cfg.heads, n, dim);
      for (std::size_t g = 0; g < cfg.num_groups(); ++g) {
        const std::size_t row0 = cfg.group_begin(g);
        const std::size_t rows = cfg.group_rows(g);
        const auto q_tile = qh.subspan(row0 * dim, rows * dim);
        const auto keys = mask.keys(b, h, g);
        OnlineSoftmaxState state(rows, dim);

        for (std::size_t pos = 0; pos < keys.size(); pos += chunk) {
          const auto ids = keys.subspan(pos, std::min(chunk, keys.size() - pos));
          // K and V share one index list.
          gather_rows_into(kh, n, dim, ids, k_tile);
          gather_rows_into(vh, n, dim, ids, v_tile);
          const std::size_t len = ids.size();
          scores.resize(rows * len);
          for (std::size_t r = 0; r < rows; ++r) {
            for (std::size_t t = 0; t < len; ++t) {
              scores[r * len + t] =
                  detail::score(q_tile.subspan(r * dim, dim), k_tile.row(t), scale, cfg.precision);
            }
          }
          state.update(scores, v_tile.rows, len);

          if (trace) {
            const auto gb = static_cast<std::uint32_t>(b), gh = static_cast<std::uint32_t>(h),
                       gg = static_cast<std::uint32_t>(g), rr = static_cast<std::uint32_t>(rows),
                       ll = static_cast<std::uint32_t>(len);
            trace->events.push_back({EventKind::kGather, gb, gh, gg, rr, ll});
            trace->events.push_back({EventKind::kTileCompute, gb, gh, gg, rr, ll});
            const std::size_t live = rows * dim + 2 * len * dim + rows * len + 2 * rows + rows * dim;
            trace->peak_scratch_floats = std::max(trace->peak_scratch_floats, live);
          }
        }

        const auto o_tile = state.finalize();
        std::copy(o_tile.begin(), o_tile.end(),
                  out.begin() + static_cast<std::ptrdiff_t>(((b * cfg.heads + h) * n + row0) * dim));
      }
    }
  }
  return AttnTensor(qkv_dims(cfg), std::move(out));
}

ExecutionTrace sparse_schedule(const AttnConfig& cfg, const SparseIndexMask& mask) {
  cfg.validate();
  mask.check_compatible(cfg);
  ExecutionTrace trace;
  trace.head_dim = cfg.head_dim;
  const std::size_t m = cfg.group_size;
  for (std::size_t b = 0; b < cfg.batch; ++b) {
    for (std::size_t h = 0; h < cfg.heads; ++h) {
      for (std::size_t g = 0; g < cfg.num_groups(); ++g) {
        const auto rows = static_cast<std::uint32_t>(cfg.group_rows(g));
        const std::size_t count = mask.keys(b, h, g).size();
        for (std::size_t pos = 0; pos < count; pos += m) {
          const auto len = static_cast<std::uint32_t>(std::min(m, count - pos));
          const TraceEvent gather{EventKind::kGather, static_cast<std::uint32_t>(b),
                                  static_cast<std::uint32_t>(h), static_cast<std::uint32_t>(g), rows,
                                  len};
          TraceEvent compute = gather;
          compute.kind = EventKind::kTileCompute;
          trace.events.push_back(gather);
          trace.events.push_back(compute);
        }
      }
    }
  }
  return trace;
}

}  // namespace fgattn

// Copyright 2026 The fgattn Authors
// SPDX-License-Identifier: Apache-2.0

#include "fgattn/tiled.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "kernel_common.hpp"

namespace fgattn {

OnlineSoftmaxState::OnlineSoftmaxState(std::size_t rows, std::size_t dim)
    : rows(rows),
      dim(dim),
      running_max(rows, -std::numeric_limits<float>::infinity()),
      running_denom(rows, 0.0f),
      acc(rows * dim, 0.0f) {}

void OnlineSoftmaxState::update(std::span<const float> scores, std::span<const float> values,
                                std::size_t tile_len) {
  if (tile_len == 0) throw ContractViolation("online softmax tile must hold at least one key");
  if (scores.size() != rows * tile_len) throw ShapeError("score tile must be rows x tile_len");
  if (values.size() != tile_len * dim) throw ShapeError("value tile must be tile_len x dim");

  for (std::size_t r = 0; r < rows; ++r) {
    const auto row_scores = scores.subspan(r * tile_len, tile_len);
    const float tile_max = *std::max_element(row_scores.begin(), row_scores.end());
    const float new_max = std::max(running_max[r], tile_max);
    if (new_max == -std::numeric_limits<float>::infinity()) continue;

    float* acc_row = acc.data() + r * dim;
    const float correction = std::exp(running_max[r] - new_max);
    if (correction != 1.0f) {
      running_denom[r] *= correction;
      for (std::size_t d = 0; d < dim; ++d) acc_row[d] *= correction;
    }
    for (std::size_t t = 0; t < tile_len; ++t) {
      const float p = std::exp(row_scores[t] - new_max);
      if (p == 0.0f) continue;
      running_denom[r] += p;
      const float* v_row = values.data() + t * dim;
      for (std::size_t d = 0; d < dim; ++d) acc_row[d] += p * v_row[d];
    }
    running_max[r] = new_max;
  }
}

std::vector<float> OnlineSoftmaxState::finalize() const {
  std::vector<float> out(rows * dim);
  for (std::size_t r = 0; r < rows; ++r) {
    if (!(running_denom[r] > 0.0f)) throw NumericError("online softmax row saw no finite score");
    const float inv = 1.0f / running_denom[r];
    for (std::size_t d = 0; d < dim; ++d) out[r * dim + d] = acc[r * dim + d] * inv;
  }
  return out;
}

OnlineSoftmaxState online_softmax_update(OnlineSoftmaxState state, std::span<const float> scores,
                                         std::span<const float> values, std::size_t tile_len) {
  state.update(scores, values, tile_len);
  return state;
}

AttnTensor flash_attention(const AttnTensor& q, const AttnTensor& k, const AttnTensor& v,
                           const AttnConfig& cfg, ExecutionTrace* trace) {
  return flash_attention(q, k, v, cfg, cfg.group_size, trace);
}

AttnTensor flash_attention(const AttnTensor& q, const AttnTensor& k, const AttnTensor& v,
                           const AttnConfig& cfg, std::size_t key_tile, ExecutionTrace* trace) {
  detail::check_qkv(q, k, v, cfg);
  if (key_tile == 0) throw ShapeError("key tile width must be >= 1");
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
  for (std::size_t b = 0; b < cfg.batch; ++b) {
    for (std::size_t h = 0; h < cfg.heads; ++h) {
      const auto qh = qi.head(b, h, cfg.heads, n, dim);
      const auto kh = ki.head(b, h, cfg.heads, n, dim);
      const auto vh = vi.head(b, h, cfg.heads, n, dim);
      for (std::size_t g = 0; g < cfg.num_groups(); ++g) {
        const std::size_t row0 = cfg.group_begin(g);
        const std::size_t rows = cfg.group_rows(g);
        const auto q_tile = qh.subspan(row0 * dim, rows * dim);
        OnlineSoftmaxState state(rows, dim);

        for (std::size_t key0 = 0; key0 < n; key0 += key_tile) {
          const std::size_t len = std::min(key_tile, n - key0);
          const auto k_tile = kh.subspan(key0 * dim, len * dim);
          const auto v_tile = vh.subspan(key0 * dim, len * dim);
          scores.resize(rows * len);
          for (std::size_t r = 0; r < rows; ++r) {
            for (std::size_t t = 0; t < len; ++t) {
              scores[r * len + t] = detail::score(q_tile.subspan(r * dim, dim),
                                                  k_tile.subspan(t * dim, dim), scale, cfg.precision);
            }
          }
          state.update(scores, v_tile, len);

          if (trace) {
            const auto gb = static_cast<std::uint32_t>(b), gh = static_cast<std::uint32_t>(h),
                       gg = static_cast<std::uint32_t>(g), rr = static_cast<std::uint32_t>(rows),
                       ll = static_cast<std::uint32_t>(len);
            trace->events.push_back({EventKind::kTileLoad, gb, gh, gg, rr, ll});
            trace->events.push_back({EventKind::kTileCompute, gb, gh, gg, rr, ll});
            // Q tile, K and V tiles, score tile, and max/denom/acc state.
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

ExecutionTrace dense_schedule(const AttnConfig& cfg) {
  cfg.validate();
  ExecutionTrace trace;
  trace.head_dim = cfg.head_dim;
  const std::size_t n = cfg.seq_len;
  const std::size_t m = cfg.group_size;
  for (std::size_t b = 0; b < cfg.batch; ++b) {
    for (std::size_t h = 0; h < cfg.heads; ++h) {
      for (std::size_t g = 0; g < cfg.num_groups(); ++g) {
        const auto rows = static_cast<std::uint32_t>(cfg.group_rows(g));
        for (std::size_t key0 = 0; key0 < n; key0 += m) {
          const auto len = static_cast<std::uint32_t>(std::min(m, n - key0));
          const TraceEvent load{EventKind::kTileLoad, static_cast<std::uint32_t>(b),
                                static_cast<std::uint32_t>(h), static_cast<std::uint32_t>(g), rows,
                                len};
          TraceEvent compute = load;
          compute.kind = EventKind::kTileCompute;
          trace.events.push_back(load);
          trace.events.push_back(compute);
        }
      }
    }
  }
  return trace;
}

}  // namespace fgattn

// Copyright 2026 The fgattn Authors
// SPDX-License-Identifier: Apache-2.0

#include "fgattn/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ranges>
#include <vector>

#include "kernel_common.hpp"

namespace fgattn {
namespace {

// One output row over the keys in `key_ids`. Scores are computed in working
// precision, softmax and the value mix in double.
template <typename KeyRange>
void attend_row(std::span<const float> q_row, std::span<const float> keys,
                std::span<const float> values, std::size_t dim, const KeyRange& key_ids,
                float scale, Precision precision, std::vector<double>& scratch,
                std::span<float> out) {
  scratch.clear();
  double row_max = -std::numeric_limits<double>::infinity();
  for (const auto j : key_ids) {
    const float s = detail::score(q_row, keys.subspan(j * dim, dim), scale, precision);
    scratch.push_back(s);
    row_max = std::max(row_max, static_cast<double>(s));
  }
  if (scratch.empty()) throw ContractViolation("attention over an empty key set");

  std::vector<double> acc(dim, 0.0);
  double denom = 0.0;
  std::size_t t = 0;
  for (const auto j : key_ids) {
    const double w = std::exp(scratch[t++] - row_max);
    denom += w;
    const float* v_row = values.data() + j * dim;
    for (std::size_t d = 0; d < dim; ++d) acc[d] += w * v_row[d];
  }
  for (std::size_t d = 0; d < dim; ++d) {
    out[d] = static_cast<float>(acc[d] / denom);
    if (!std::isfinite(out[d])) throw NumericError("non-finite attention output");
  }
}

}  // namespace

AttnTensor dense_attention(const AttnTensor& q, const AttnTensor& k, const AttnTensor& v,
                           const AttnConfig& cfg) {
  detail::check_qkv(q, k, v, cfg);
  const std::size_t n = cfg.seq_len;
  const std::size_t dim = cfg.head_dim;
  const float scale = static_cast<float>(cfg.scale);
  const detail::Ingested qi(q, cfg.precision), ki(k, cfg.precision), vi(v, cfg.precision);

  std::vector<float> out(qkv_dims(cfg).size());
  std::vector<double> scratch;
  scratch.reserve(n);
  const auto all_keys = std::views::iota(std::size_t{0}, n);
  for (std::size_t b = 0; b < cfg.batch; ++b) {
    for (std::size_t h = 0; h < cfg.heads; ++h) {
      const auto qh = qi.head(b, h, cfg.heads, n, dim);
      const auto kh = ki.head(b, h, cfg.heads, n, dim);
      const auto vh = vi.head(b, h, cfg.heads, n, dim);
      float* oh = out.data() + (b * cfg.heads + h) * n * dim;
      for (std::size_t i = 0; i < n; ++i) {
        attend_row(qh.subspan(i * dim, dim), kh, vh, dim, all_keys, scale, cfg.precision, scratch,
                   std::span<float>(oh + i * dim, dim));
      }
    }
  }
  return AttnTensor(qkv_dims(cfg), std::move(out));
}

AttnMap attention_map(const AttnTensor& q, const AttnTensor& k, const AttnConfig& cfg) {
  detail::check_qk(q, k, cfg);
  const std::size_t n = cfg.seq_len;
  const std::size_t dim = cfg.head_dim;
  const float scale = static_cast<float>(cfg.scale);
  const detail::Ingested qi(q, cfg.precision), ki(k, cfg.precision);

  std::vector<float> map(cfg.batch * cfg.heads * n * n);
  std::vector<double> scores(n);
  for (std::size_t b = 0; b < cfg.batch; ++b) {
    for (std::size_t h = 0; h < cfg.heads; ++h) {
      const auto qh = qi.head(b, h, cfg.heads, n, dim);
      const auto kh = ki.head(b, h, cfg.heads, n, dim);
      float* mh = map.data() + (b * cfg.heads + h) * n * n;
      for (std::size_t i = 0; i < n; ++i) {
        double row_max = -std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < n; ++j) {
          scores[j] = detail::score(qh.subspan(i * dim, dim), kh.subspan(j * dim, dim), scale,
                                    cfg.precision);
          row_max = std::max(row_max, scores[j]);
        }
        double denom = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
          scores[j] = std::exp(scores[j] - row_max);
          denom += scores[j];
        }
        for (std::size_t j = 0; j < n; ++j) {
          mh[i * n + j] = static_cast<float>(scores[j] / denom);
        }
      }
    }
  }
  return AttnMap(cfg.batch, cfg.heads, n, std::move(map));
}

AttnTensor masked_dense_attention(const AttnTensor& q, const AttnTensor& k, const AttnTensor& v,
                                  const SparseIndexMask& mask, const AttnConfig& cfg) {
  detail::check_qkv(q, k, v, cfg);
  mask.check_compatible(cfg);
  const std::size_t n = cfg.seq_len;
  const std::size_t dim = cfg.head_dim;
  const float scale = static_cast<float>(cfg.scale);
  const detail::Ingested qi(q, cfg.precision), ki(k, cfg.precision), vi(v, cfg.precision);

  std::vector<float> out(qkv_dims(cfg).size());
  std::vector<double> scratch;
  scratch.reserve(n);
  for (std::size_t b = 0; b < cfg.batch; ++b) {
    for (std::size_t h = 0; h < cfg.heads; ++h) {
      const auto qh = qi.head(b, h, cfg.heads, n, dim);
      const auto kh = ki.head(b, h, cfg.heads, n, dim);
      const auto vh = vi.head(b, h, cfg.heads, n, dim);
      float* oh = out.data() + (b * cfg.heads + h) * n * dim;
      for (std::size_t g = 0; g < cfg.num_groups(); ++g) {
        const auto keys = mask.keys(b, h, g);
        for (std::size_t i = cfg.group_begin(g); i < cfg.group_end(g); ++i) {
          attend_row(qh.subspan(i * dim, dim), kh, vh, dim, keys, scale, cfg.precision, scratch,
                     std::span<float>(oh + i * dim, dim));
        }
      }
    }
  }
  return AttnTensor(qkv_dims(cfg), std::move(out));
}

}  // namespace fgattn

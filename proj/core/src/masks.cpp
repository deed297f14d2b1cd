// Copyright 2026 The fgattn Authors
// SPDX-License-Identifier: Apache-2.0

#include "fgattn/masks.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>
#include <string>

#include "fgattn/bf16.hpp"
#include "fgattn/errors.hpp"
#include "fgattn/oracle.hpp"
#include "kernel_common.hpp"

namespace fgattn {
namespace {

void check_map(const AttnMap& map, const AttnConfig& cfg) {
  cfg.validate();
  if (map.batch() != cfg.batch || map.heads() != cfg.heads || map.seq_len() != cfg.seq_len) {
    throw ShapeError("attention map does not match config (B, H, N)");
  }
}

// Index of the largest value, first one on ties.
std::uint32_t argmax(std::span<const double> values) {
  return static_cast<std::uint32_t>(std::max_element(values.begin(), values.end()) - values.begin());
}

}  // namespace

std::string_view to_string(MaskStrategy s) {
  switch (s) {
    case MaskStrategy::kCachedThreshold:
      return "cached";
    case MaskStrategy::kAvgQueryThreshold:
      return "avgq";
    case MaskStrategy::kAvgQueryTopK:
      return "avgq-topk";
  }
  return "?";
}

MaskStrategy parse_strategy(std::string_view text) {
  if (text == "cached") return MaskStrategy::kCachedThreshold;
  if (text == "avgq") return MaskStrategy::kAvgQueryThreshold;
  if (text == "avgq-topk") return MaskStrategy::kAvgQueryTopK;
  throw std::invalid_argument("unknown mask strategy '" + std::string(text) + "'");
}

void MaskBuilderConfig::validate(std::size_t seq_len) const {
  if (refresh_interval == 0) throw std::invalid_argument("refresh_interval must be >= 1");
  if (strategy == MaskStrategy::kAvgQueryTopK) {
    if (top_k == 0 || top_k > seq_len) throw std::invalid_argument("top_k must be in [1, N]");
  } else if (!(tau > 0.0)) {
    throw std::invalid_argument("tau must be > 0 for threshold strategies");
  }
}

SparseIndexMask build_mask_cached(const AttnMap& map, const AttnConfig& cfg, double tau) {
  check_map(map, cfg);
  if (!(tau > 0.0)) throw std::invalid_argument("tau must be > 0");
  const std::size_t n = cfg.seq_len;
  std::vector<std::vector<std::uint32_t>> lists;
  lists.reserve(cfg.batch * cfg.heads * cfg.num_groups());
  std::vector<double> col_max(n);
  for (std::size_t b = 0; b < cfg.batch; ++b) {
    for (std::size_t h = 0; h < cfg.heads; ++h) {
      for (std::size_t g = 0; g < cfg.num_groups(); ++g) {
        std::fill(col_max.begin(), col_max.end(), 0.0);
        for (std::size_t i = cfg.group_begin(g); i < cfg.group_end(g); ++i) {
          const auto row = map.row(b, h, i);
          for (std::size_t j = 0; j < n; ++j) {
            col_max[j] = std::max(col_max[j], static_cast<double>(quantize(row[j], cfg.precision)));
          }
        }
        std::vector<std::uint32_t> keys;
        for (std::size_t j = 0; j < n; ++j) {
          if (col_max[j] >= tau) keys.push_back(static_cast<std::uint32_t>(j));
        }
        if (keys.empty()) keys.push_back(argmax(col_max));
        lists.push_back(std::move(keys));
      }
    }
  }
  return SparseIndexMask(cfg.batch, cfg.heads, n, cfg.group_size, std::move(lists));
}

SparseIndexMask build_mask_avg_query(const AttnTensor& q, const AttnTensor& k,
                                     const AttnConfig& cfg, const MaskBuilderConfig& builder) {
  detail::check_qk(q, k, cfg);
  builder.validate(cfg.seq_len);
  const std::size_t n = cfg.seq_len;
  const std::size_t dim = cfg.head_dim;
  const detail::Ingested qi(q, cfg.precision), ki(k, cfg.precision);

  std::vector<std::vector<std::uint32_t>> lists;
  lists.reserve(cfg.batch * cfg.heads * cfg.num_groups());
  std::vector<double> q_avg(dim);
  std::vector<double> s(n);
  std::vector<std::uint32_t> order(n);
  for (std::size_t b = 0; b < cfg.batch; ++b) {
    for (std::size_t h = 0; h < cfg.heads; ++h) {
      const auto qh = qi.head(b, h, cfg.heads, n, dim);
      const auto kh = ki.head(b, h, cfg.heads, n, dim);
      for (std::size_t g = 0; g < cfg.num_groups(); ++g) {
        std::fill(q_avg.begin(), q_avg.end(), 0.0);
        for (std::size_t i = cfg.group_begin(g); i < cfg.group_end(g); ++i) {
          for (std::size_t d = 0; d < dim; ++d) q_avg[d] += qh[i * dim + d];
        }
        const double rows = static_cast<double>(cfg.group_rows(g));
        for (double& x : q_avg) x /= rows;

        for (std::size_t j = 0; j < n; ++j) {
          double dot = 0.0;
          for (std::size_t d = 0; d < dim; ++d) dot += kh[j * dim + d] * q_avg[d];
          double logit = dot * cfg.scale;
          if (cfg.precision == Precision::kBf16) logit = round_bf16(static_cast<float>(logit));
          s[j] = std::exp(logit) / static_cast<double>(dim);
        }

        std::vector<std::uint32_t> keys;
        if (builder.strategy == MaskStrategy::kAvgQueryTopK) {
          std::iota(order.begin(), order.end(), 0u);
          const auto kth = order.begin() + static_cast<std::ptrdiff_t>(builder.top_k);
          std::partial_sort(order.begin(), kth, order.end(), [&](std::uint32_t a, std::uint32_t c) {
            return s[a] != s[c] ? s[a] > s[c] : a < c;
          });
          keys.assign(order.begin(), kth);
        } else {
          for (std::size_t j = 0; j < n; ++j) {
            if (s[j] >= builder.tau) keys.push_back(static_cast<std::uint32_t>(j));
          }
          if (keys.empty()) keys.push_back(argmax(s));
        }
        lists.push_back(std::move(keys));
      }
    }
  }
  return SparseIndexMask(cfg.batch, cfg.heads, n, cfg.group_size, std::move(lists));
}

SparseIndexMask build_mask(const AttnTensor& q, const AttnTensor& k, const AttnConfig& cfg,
                           const MaskBuilderConfig& builder) {
  if (builder.strategy == MaskStrategy::kCachedThreshold) {
    builder.validate(cfg.seq_len);
    return build_mask_cached(attention_map(q, k, cfg), cfg, builder.tau);
  }
  return build_mask_avg_query(q, k, cfg, builder);
}

bool refresh_policy(const CachedMaskState& state, std::size_t iteration) {
  if (iteration < state.built_at_iteration) return false;
  return iteration - state.built_at_iteration >= state.refresh_interval;
}

double block_sparsity(const AttnMap& map, std::size_t block, double tau) {
  const std::size_t n = map.seq_len();
  if (block == 0 || block > n) throw ShapeError("block size must be in [1, N]");
  const std::size_t tiles = (n + block - 1) / block;
  std::vector<char> significant(tiles * tiles);
  double total = 0.0;
  for (std::size_t b = 0; b < map.batch(); ++b) {
    for (std::size_t h = 0; h < map.heads(); ++h) {
      std::fill(significant.begin(), significant.end(), 0);
      for (std::size_t i = 0; i < n; ++i) {
        const auto row = map.row(b, h, i);
        char* tile_row = significant.data() + (i / block) * tiles;
        for (std::size_t j = 0; j < n; ++j) {
          if (row[j] >= tau) tile_row[j / block] = 1;
        }
      }
      const auto skipped = std::count(significant.begin(), significant.end(), 0);
      total += static_cast<double>(skipped) / static_cast<double>(tiles * tiles);
    }
  }
  return total / static_cast<double>(map.batch() * map.heads());
}

double slice_sparsity(const AttnMap& map, const AttnConfig& cfg, double tau) {
  check_map(map, cfg);
  const std::size_t n = cfg.seq_len;
  std::vector<char> significant(n);
  std::size_t skipped = 0;
  for (std::size_t b = 0; b < cfg.batch; ++b) {
    for (std::size_t h = 0; h < cfg.heads; ++h) {
      for (std::size_t g = 0; g < cfg.num_groups(); ++g) {
        std::fill(significant.begin(), significant.end(), 0);
        for (std::size_t i = cfg.group_begin(g); i < cfg.group_end(g); ++i) {
          const auto row = map.row(b, h, i);
          for (std::size_t j = 0; j < n; ++j) {
            if (quantize(row[j], cfg.precision) >= tau) significant[j] = 1;
          }
        }
        skipped += static_cast<std::size_t>(std::count(significant.begin(), significant.end(), 0));
      }
    }
  }
  const double slices = static_cast<double>(cfg.batch * cfg.heads * cfg.num_groups() * n);
  return static_cast<double>(skipped) / slices;
}

double parse_threshold(std::string_view text, std::size_t seq_len) {
  while (!text.empty() && text.front() == ' ') text.remove_prefix(1);
  while (!text.empty() && text.back() == ' ') text.remove_suffix(1);
  bool per_n = false;
  if (text.size() >= 2 && text[text.size() - 2] == '/' &&
      (text.back() == 'N' || text.back() == 'n')) {
    per_n = true;
    text.remove_suffix(2);
  }
  double value = 1.0;
  if (!text.empty() || !per_n) {
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size()) {
      throw std::invalid_argument("cannot parse threshold '" + std::string(text) + "'");
    }
  }
  if (per_n) {
    if (seq_len == 0) throw std::invalid_argument("x/N threshold needs N >= 1");
    value /= static_cast<double>(seq_len);
  }
  return value;
}

}  // namespace fgattn

// Copyright 2026 The fgattn Authors
// SPDX-License-Identifier: Apache-2.0

#include "fgattn/config.hpp"

#include <string>

#include "fgattn/errors.hpp"

namespace fgattn {

std::string_view to_string(Precision p) {
  return p == Precision::kBf16 ? "bf16" : "full";
}

Precision parse_precision(std::string_view text) {
  if (text == "full" || text == "f32" || text == "fp32") return Precision::kFull;
  if (text == "bf16" || text == "emulated-bf16") return Precision::kBf16;
  throw std::invalid_argument("unknown precision '" + std::string(text) + "'");
}

AttnConfig AttnConfig::make(std::size_t batch, std::size_t heads, std::size_t seq_len,
                            std::size_t head_dim, std::size_t group_size, Precision precision) {
  AttnConfig cfg;
  cfg.batch = batch;
  cfg.heads = heads;
  cfg.seq_len = seq_len;
  cfg.head_dim = head_dim;
  cfg.group_size = group_size;
  cfg.precision = precision;
  cfg.scale = head_dim > 0 ? default_scale(head_dim) : 1.0;
  cfg.validate();
  return cfg;
}

void AttnConfig::validate() const {
  if (batch == 0 || heads == 0 || seq_len == 0 || head_dim == 0 || group_size == 0) {
    throw ShapeError("config dimensions must all be >= 1");
  }
  if (group_size > seq_len) throw ShapeError("group size M must not exceed seq_len N");
  if (!(scale > 0.0) || !std::isfinite(scale)) throw ShapeError("scale must be positive and finite");
  // Key indices are stored as u32 in masks and files.
  if (seq_len > 0xffffffffull) throw ShapeError("seq_len exceeds 32-bit index range");
}

}  // namespace fgattn

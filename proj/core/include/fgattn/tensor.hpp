// Copyright 2026 The fgattn Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "fgattn/config.hpp"

namespace fgattn {

struct Dims4 {
  std::size_t batch = 0;
  std::size_t heads = 0;
  std::size_t rows = 0;
  std::size_t cols = 0;

  std::size_t size() const { return batch * heads * rows * cols; }
  bool operator==(const Dims4&) const = default;
};

/// Dense [B, H, N, D] tensor of query/key/value/output vectors.
///
/// Row-major with D innermost: element (b, h, n, d) lives at
/// ((b*H + h)*N + n)*D + d. Immutable once constructed.
class AttnTensor {
 public:
  AttnTensor() = default;
  // Throws ShapeError on length mismatch, NumericError on non-finite data.
  AttnTensor(Dims4 dims, std::vector<float> data);

  static AttnTensor zeros(const AttnConfig& cfg);
  static AttnTensor gaussian(const AttnConfig& cfg, std::uint64_t seed,
                             std::uint64_t stream = 0);
  static AttnTensor from_data(const AttnConfig& cfg, std::vector<float> data);

  const Dims4& dims() const { return dims_; }
  std::span<const float> data() const { return data_; }

  std::size_t offset(std::size_t b, std::size_t h, std::size_t n, std::size_t d) const {
    return ((b * dims_.heads + h) * dims_.rows + n) * dims_.cols + d;
  }
  float at(std::size_t b, std::size_t h, std::size_t n, std::size_t d) const {
    return data_[offset(b, h, n, d)];
  }
  std::span<const float> row(std::size_t b, std::size_t h, std::size_t n) const {
    return std::span<const float>(data_).subspan(offset(b, h, n, 0), dims_.cols);
  }
  // The N x D matrix of one (batch, head) pair.
  std::span<const float> head(std::size_t b, std::size_t h) const {
    return std::span<const float>(data_).subspan(offset(b, h, 0, 0), dims_.rows * dims_.cols);
  }

  bool matches(const AttnConfig& cfg) const;
  bool operator==(const AttnTensor&) const = default;

 private:
  Dims4 dims_{};
  std::vector<float> data_;
};

Dims4 qkv_dims(const AttnConfig& cfg);

/// Post-softmax attention scores, [B, H, N, N].
class AttnMap {
 public:
  AttnMap() = default;
  // Entries must be finite and in [0, 1]; each row must sum to <= 1 + 1e-5.
  AttnMap(std::size_t batch, std::size_t heads, std::size_t seq_len, std::vector<float> data);

  std::size_t batch() const { return batch_; }
  std::size_t heads() const { return heads_; }
  std::size_t seq_len() const { return seq_len_; }
  Dims4 dims() const { return {batch_, heads_, seq_len_, seq_len_}; }
  std::span<const float> data() const { return data_; }

  float at(std::size_t b, std::size_t h, std::size_t i, std::size_t j) const {
    return data_[((b * heads_ + h) * seq_len_ + i) * seq_len_ + j];
  }
  std::span<const float> row(std::size_t b, std::size_t h, std::size_t i) const {
    return std::span<const float>(data_).subspan(((b * heads_ + h) * seq_len_ + i) * seq_len_,
                                                 seq_len_);
  }

  bool operator==(const AttnMap&) const = default;

 private:
  std::size_t batch_ = 0;
  std::size_t heads_ = 0;
  std::size_t seq_len_ = 0;
  std::vector<float> data_;
};

}  // namespace fgattn

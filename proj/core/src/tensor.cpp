// Copyright 2026 The fgattn Authors
// SPDX-License-Identifier: Apache-2.0

#include "fgattn/tensor.hpp"

#include <cmath>
#include <string>

#include "fgattn/errors.hpp"
#include "fgattn/random.hpp"

namespace fgattn {

Dims4 qkv_dims(const AttnConfig& cfg) {
  return {cfg.batch, cfg.heads, cfg.seq_len, cfg.head_dim};
}

AttnTensor::AttnTensor(Dims4 dims, std::vector<float> data) : dims_(dims), data_(std::move(data)) {
  if (data_.size() != dims_.size()) {
    throw ShapeError("tensor payload has " + std::to_string(data_.size()) + " elements, dims need " +
                     std::to_string(dims_.size()));
  }
  for (float x : data_) {
    if (!std::isfinite(x)) throw NumericError("tensor contains a non-finite entry");
  }
}

AttnTensor AttnTensor::zeros(const AttnConfig& cfg) {
  cfg.validate();
  const Dims4 dims = qkv_dims(cfg);
  return AttnTensor(dims, std::vector<float>(dims.size(), 0.0f));
}

AttnTensor AttnTensor::gaussian(const AttnConfig& cfg, std::uint64_t seed, std::uint64_t stream) {
  cfg.validate();
  const Dims4 dims = qkv_dims(cfg);
  GaussianStream rng(seed, stream);
  std::vector<float> data(dims.size());
  for (float& x : data) x = static_cast<float>(rng.next());
  return AttnTensor(dims, std::move(data));
}

AttnTensor AttnTensor::from_data(const AttnConfig& cfg, std::vector<float> data) {
  cfg.validate();
  return AttnTensor(qkv_dims(cfg), std::move(data));
}

bool AttnTensor::matches(const AttnConfig& cfg) const { return dims_ == qkv_dims(cfg); }

AttnMap::AttnMap(std::size_t batch, std::size_t heads, std::size_t seq_len, std::vector<float> data)
    : batch_(batch), heads_(heads), seq_len_(seq_len), data_(std::move(data)) {
  if (batch == 0 || heads == 0 || seq_len == 0) throw ShapeError("map dimensions must be >= 1");
  if (data_.size() != batch * heads * seq_len * seq_len) {
    throw ShapeError("map payload does not match [B, H, N, N]");
  }
  for (std::size_t r = 0; r < batch * heads * seq_len; ++r) {
    double sum = 0.0;
    for (std::size_t j = 0; j < seq_len; ++j) {
      const float a = data_[r * seq_len + j];
      if (!std::isfinite(a) || a < 0.0f || a > 1.0f) {
        throw NumericError("attention score outside [0, 1]");
      }
      sum += a;
    }
    if (sum > 1.0 + 1e-5) throw NumericError("attention map row sums above 1");
  }
}

}  // namespace fgattn

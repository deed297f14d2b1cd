// Copyright 2026 The fgattn Authors
// SPDX-License-Identifier: Apache-2.0

// Internal helpers shared by the attention kernels. Not installed.

#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "fgattn/bf16.hpp"
#include "fgattn/config.hpp"
#include "fgattn/errors.hpp"
#include "fgattn/tensor.hpp"

namespace fgattn::detail {

inline void check_qk(const AttnTensor& q, const AttnTensor& k, const AttnConfig& cfg) {
  cfg.validate();
  const Dims4 want = qkv_dims(cfg);
  if (q.dims() != want) throw ShapeError("query tensor does not match config dims");
  if (k.dims() != want) throw ShapeError("key tensor does not match config dims");
}

inline void check_qkv(const AttnTensor& q, const AttnTensor& k, const AttnTensor& v,
                      const AttnConfig& cfg) {
  check_qk(q, k, cfg);
  if (v.dims() != qkv_dims(cfg)) throw ShapeError("value tensor does not match config dims");
}

// Tensor data as seen by a kernel: rounded to bf16 on ingestion in emulated
// mode, a plain view otherwise.
class Ingested {
 public:
  Ingested(const AttnTensor& t, Precision p) {
    if (p == Precision::kBf16) {
      storage_ = round_bf16(t.data());
      view_ = storage_;
    } else {
      view_ = t.data();
    }
  }
  Ingested(const Ingested&) = delete;
  Ingested& operator=(const Ingested&) = delete;

  std::span<const float> all() const { return view_; }
  // N x D matrix of head (b, h); n_rows * dim floats.
  std::span<const float> head(std::size_t b, std::size_t h, std::size_t heads,
                              std::size_t n_rows, std::size_t dim) const {
    return view_.subspan((b * heads + h) * n_rows * dim, n_rows * dim);
  }

 private:
  std::vector<float> storage_;
  std::span<const float> view_;
};

inline float dot(std::span<const float> a, std::span<const float> b) {
  float s = 0.0f;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// Scaled query-key score in working precision, rounded per precision mode.
// Every kernel goes through this so that scores agree bit for bit.
inline float score(std::span<const float> q_row, std::span<const float> k_row, float scale,
                   Precision p) {
  return quantize(dot(q_row, k_row) * scale, p);
}

}  // namespace fgattn::detail

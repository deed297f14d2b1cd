// Copyright 2026 The fgattn Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "fgattn/sparse_mask.hpp"
#include "fgattn/tensor.hpp"

namespace fgattn::io {

// Tensor file ("FGT1"), little-endian:
//   magic[4] | version u16 | dtype u16 (0 = f32) | rank u32 | dims u64[rank] | payload
// Mask file ("FGM1"), little-endian:
//   magic[4] | version u16 | B u64 | H u64 | G u64 | N u64 | M u64 |
//   per (b, h, g): length u32 then length sorted u32 indices
// Attention maps use the tensor format with dims [B, H, N, N].

inline constexpr std::uint16_t kTensorVersion = 1;
inline constexpr std::uint16_t kMaskVersion = 1;
inline constexpr std::uint16_t kDtypeF32 = 0;

struct RawTensor {
  std::vector<std::uint64_t> dims;
  std::vector<float> data;
};

std::vector<std::uint8_t> encode_tensor(std::span<const std::uint64_t> dims,
                                        std::span<const float> data);
RawTensor decode_tensor(std::span<const std::uint8_t> bytes);

std::vector<std::uint8_t> encode(const AttnTensor& t);
std::vector<std::uint8_t> encode(const AttnMap& m);
std::vector<std::uint8_t> encode(const SparseIndexMask& mask);

AttnTensor decode_attn_tensor(std::span<const std::uint8_t> bytes);
AttnMap decode_attn_map(std::span<const std::uint8_t> bytes);
SparseIndexMask decode_mask(std::span<const std::uint8_t> bytes);

std::vector<std::uint8_t> read_file(const std::string& path);
void write_file(const std::string& path, std::span<const std::uint8_t> bytes);

void write_tensor(const std::string& path, const AttnTensor& t);
AttnTensor read_tensor(const std::string& path);
void write_map(const std::string& path, const AttnMap& m);
AttnMap read_map(const std::string& path);
void write_mask(const std::string& path, const SparseIndexMask& mask);
SparseIndexMask read_mask(const std::string& path);

// 64-bit FNV-1a, used for fixture checksums.
std::uint64_t fnv1a64(std::span<const std::uint8_t> bytes);

}  // namespace fgattn::io

// Copyright 2026 The fgattn Authors
// SPDX-License-Identifier: Apache-2.0

#include "fgattn/io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>
#include <string_view>

#include "fgattn/errors.hpp"

namespace fgattn::io {
namespace {

constexpr std::string_view kTensorMagic = "FGT1";
constexpr std::string_view kMaskMagic = "FGM1";

class Writer {
 public:
  void magic(std::string_view m) { bytes_.insert(bytes_.end(), m.begin(), m.end()); }
  void u16(std::uint16_t v) { put(v, 2); }
  void u32(std::uint32_t v) { put(v, 4); }
  void u64(std::uint64_t v) { put(v, 8); }
  void f32(float v) { put(std::bit_cast<std::uint32_t>(v), 4); }
  std::vector<std::uint8_t> take() { return std::move(bytes_); }
  void reserve(std::size_t n) { bytes_.reserve(n); }

 private:
  void put(std::uint64_t v, int width) {
    for (int i = 0; i < width; ++i) bytes_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  std::vector<std::uint8_t> bytes_;
};

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  void expect_magic(std::string_view m) {
    if (bytes_.size() < m.size() || std::memcmp(bytes_.data(), m.data(), m.size()) != 0) {
      throw FormatError("bad magic, expected '" + std::string(m) + "'");
    }
    pos_ = m.size();
  }
  std::uint16_t u16() { return static_cast<std::uint16_t>(get(2)); }
  std::uint32_t u32() { return static_cast<std::uint32_t>(get(4)); }
  std::uint64_t u64() { return get(8); }
  float f32() { return std::bit_cast<float>(static_cast<std::uint32_t>(get(4))); }

  std::size_t remaining() const { return bytes_.size() - pos_; }
  void expect_end() const {
    if (pos_ != bytes_.size()) throw CorruptionError("trailing bytes after payload");
  }

 private:
  std::uint64_t get(int width) {
    if (remaining() < static_cast<std::size_t>(width)) throw CorruptionError("truncated file");
    std::uint64_t v = 0;
    for (int i = 0; i < width; ++i) v |= static_cast<std::uint64_t>(bytes_[pos_ + i]) << (8 * i);
    pos_ += static_cast<std::size_t>(width);
    return v;
  }
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

// Product of dims, or CorruptionError if it cannot fit the remaining payload.
std::uint64_t checked_elements(std::span<const std::uint64_t> dims, std::size_t remaining,
                               std::size_t elt) {
  std::uint64_t count = 1;
  for (auto d : dims) {
    if (d != 0 && count > std::numeric_limits<std::uint64_t>::max() / d) {
      throw CorruptionError("tensor dims overflow");
    }
    count *= d;
  }
  if (count > remaining / elt || count * elt != remaining) {
    throw CorruptionError("payload length does not match dims");
  }
  return count;
}

}  // namespace

std::vector<std::uint8_t> encode_tensor(std::span<const std::uint64_t> dims,
                                        std::span<const float> data) {
  std::uint64_t count = 1;
  for (auto d : dims) count *= d;
  if (count != data.size()) throw ShapeError("tensor data does not match dims");
  Writer w;
  w.reserve(12 + 8 * dims.size() + 4 * data.size());
  w.magic(kTensorMagic);
  w.u16(kTensorVersion);
  w.u16(kDtypeF32);
  w.u32(static_cast<std::uint32_t>(dims.size()));
  for (auto d : dims) w.u64(d);
  for (float x : data) w.f32(x);
  return w.take();
}

RawTensor decode_tensor(std::span<const std::uint8_t> bytes) {
  Reader r(bytes);
  r.expect_magic(kTensorMagic);
  if (const auto version = r.u16(); version != kTensorVersion) {
    throw FormatError("unsupported tensor file version " + std::to_string(version));
  }
  if (const auto dtype = r.u16(); dtype != kDtypeF32) {
    throw FormatError("unsupported dtype code " + std::to_string(dtype));
  }
  const std::uint32_t rank = r.u32();
  if (rank > r.remaining() / 8) throw CorruptionError("rank exceeds header size");
  RawTensor out;
  out.dims.resize(rank);
  for (auto& d : out.dims) d = r.u64();
  const auto count = checked_elements(out.dims, r.remaining(), 4);
  out.data.resize(count);
  for (auto& x : out.data) x = r.f32();
  r.expect_end();
  return out;
}

std::vector<std::uint8_t> encode(const AttnTensor& t) {
  const auto& d = t.dims();
  const std::uint64_t dims[] = {d.batch, d.heads, d.rows, d.cols};
  return encode_tensor(dims, t.data());
}

std::vector<std::uint8_t> encode(const AttnMap& m) {
  const std::uint64_t dims[] = {m.batch(), m.heads(), m.seq_len(), m.seq_len()};
  return encode_tensor(dims, m.data());
}

AttnTensor decode_attn_tensor(std::span<const std::uint8_t> bytes) {
  RawTensor raw = decode_tensor(bytes);
  if (raw.dims.size() != 4) throw FormatError("attention tensor must have rank 4");
  const Dims4 dims{raw.dims[0], raw.dims[1], raw.dims[2], raw.dims[3]};
  return AttnTensor(dims, std::move(raw.data));
}

AttnMap decode_attn_map(std::span<const std::uint8_t> bytes) {
  RawTensor raw = decode_tensor(bytes);
  if (raw.dims.size() != 4 || raw.dims[2] != raw.dims[3]) {
    throw FormatError("attention map must have dims [B, H, N, N]");
  }
  return AttnMap(raw.dims[0], raw.dims[1], raw.dims[2], std::move(raw.data));
}

std::vector<std::uint8_t> encode(const SparseIndexMask& mask) {
  Writer w;
  w.reserve(6 + 40 + 4 * (mask.num_lists() + mask.total_entries()));
  w.magic(kMaskMagic);
  w.u16(kMaskVersion);
  w.u64(mask.batch());
  w.u64(mask.heads());
  w.u64(mask.groups());
  w.u64(mask.seq_len());
  w.u64(mask.group_size());
  for (std::size_t b = 0; b < mask.batch(); ++b) {
    for (std::size_t h = 0; h < mask.heads(); ++h) {
      for (std::size_t g = 0; g < mask.groups(); ++g) {
        const auto keys = mask.keys(b, h, g);
        w.u32(static_cast<std::uint32_t>(keys.size()));
        for (auto k : keys) w.u32(k);
      }
    }
  }
  return w.take();
}

SparseIndexMask decode_mask(std::span<const std::uint8_t> bytes) {
  Reader r(bytes);
  r.expect_magic(kMaskMagic);
  if (const auto version = r.u16(); version != kMaskVersion) {
    throw FormatError("unsupported mask file version " + std::to_string(version));
  }
  const std::uint64_t batch = r.u64(), heads = r.u64(), groups = r.u64(), n = r.u64(),
                      m = r.u64();
  if (batch == 0 || heads == 0 || n == 0 || m == 0 || m > n || n > 0xffffffffull) {
    throw FormatError("mask header has invalid geometry");
  }
  if (groups != (n + m - 1) / m) throw CorruptionError("mask group count disagrees with N and M");
  // Every list costs at least 8 bytes (length plus one index).
  if (batch > r.remaining() || heads > r.remaining() || groups > r.remaining() ||
      batch * heads * groups > r.remaining() / 8) {
    throw CorruptionError("mask header promises more lists than the payload holds");
  }
  std::vector<std::vector<std::uint32_t>> lists(batch * heads * groups);
  for (auto& list : lists) {
    const std::uint32_t len = r.u32();
    if (len == 0 || len > n) throw CorruptionError("mask list length out of range");
    if (len > r.remaining() / 4) throw CorruptionError("truncated mask list");
    list.resize(len);
    for (auto& k : list) k = r.u32();
    for (std::size_t i = 0; i < list.size(); ++i) {
      if (list[i] >= n || (i > 0 && list[i] <= list[i - 1])) {
        throw CorruptionError("mask list is not strictly increasing within [0, N)");
      }
    }
  }
  r.expect_end();
  return SparseIndexMask(batch, heads, n, m, std::move(lists));
}

std::vector<std::uint8_t> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  return std::vector<std::uint8_t>(std::istreambuf_iterator<char>(in), {});
}

void write_file(const std::string& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

void write_tensor(const std::string& path, const AttnTensor& t) { write_file(path, encode(t)); }
AttnTensor read_tensor(const std::string& path) { return decode_attn_tensor(read_file(path)); }
void write_map(const std::string& path, const AttnMap& m) { write_file(path, encode(m)); }
AttnMap read_map(const std::string& path) { return decode_attn_map(read_file(path)); }
void write_mask(const std::string& path, const SparseIndexMask& mask) {
  write_file(path, encode(mask));
}
SparseIndexMask read_mask(const std::string& path) { return decode_mask(read_file(path)); }

std::uint64_t fnv1a64(std::span<const std::uint8_t> bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (auto b : bytes) {
    h ^= b;
    h *= 0x100000001b3ull;
  }
  return h;
}

}  // namespace fgattn::io

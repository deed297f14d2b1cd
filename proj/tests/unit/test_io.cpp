// Copyright 2026 The fgattn Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <bit>
#include <cstring>
#include <filesystem>
#include <random>

#include "fgattn/errors.hpp"
#include "fgattn/io.hpp"
#include "fgattn/oracle.hpp"
#include "test_util.hpp"

namespace fgattn {
namespace {

using Bytes = std::vector<std::uint8_t>;

void put_le(Bytes& out, std::uint64_t v, int width) {
  for (int i = 0; i < width; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

// Hand-assembled reference encoding of a tensor file.
Bytes reference_tensor_bytes(const std::vector<std::uint64_t>& dims, const std::vector<float>& data) {
  Bytes out = {'F', 'G', 'T', '1'};
  put_le(out, 1, 2);
  put_le(out, 0, 2);
  put_le(out, dims.size(), 4);
  for (auto d : dims) put_le(out, d, 8);
  for (float x : data) put_le(out, std::bit_cast<std::uint32_t>(x), 4);
  return out;
}

std::filesystem::path temp_path(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("fgattn_test_io_" + name);
}

TEST(TensorFormat, MatchesHandAssembledBytes) {
  const std::vector<std::uint64_t> dims = {2, 3};
  const std::vector<float> data = {1.0f, -2.5f, 0.0f, 3.25e-7f, -0.0f, 1e30f};
  EXPECT_EQ(io::encode_tensor(dims, data), reference_tensor_bytes(dims, data));
}

TEST(TensorFormat, MaskHeaderLayout) {
  const SparseIndexMask m(1, 1, 4, 4, {{0, 2}});
  Bytes expected = {'F', 'G', 'M', '1'};
  put_le(expected, 1, 2);
  for (std::uint64_t v : {1, 1, 1, 4, 4}) put_le(expected, v, 8);
  put_le(expected, 2, 4);
  put_le(expected, 0, 4);
  put_le(expected, 2, 4);
  EXPECT_EQ(io::encode(m), expected);
}

TEST(RoundTrip, RandomTensorsBitwise) {
  std::mt19937_64 rng(1);
  for (int i = 0; i < 30; ++i) {
    const std::size_t n = 1 + rng() % 40;
    const auto cfg = AttnConfig::make(1 + rng() % 2, 1 + rng() % 3, n, 1 + rng() % 9, 1 + rng() % n);
    const auto t = AttnTensor::gaussian(cfg, rng());
    const auto bytes = io::encode(t);
    const auto back = io::decode_attn_tensor(bytes);
    EXPECT_EQ(back, t);
    EXPECT_EQ(io::encode(back), bytes);
  }
}

TEST(RoundTrip, RandomMasksAndMaps) {
  std::mt19937_64 rng(2);
  for (int i = 0; i < 20; ++i) {
    const std::size_t n = 2 + rng() % 30;
    const auto cfg = AttnConfig::make(1 + rng() % 2, 1 + rng() % 3, n, 4, 1 + rng() % n);
    const auto mask = testing::random_mask(cfg, 0.1 + 0.04 * i, rng());
    EXPECT_EQ(io::decode_mask(io::encode(mask)), mask);

    const auto map = attention_map(AttnTensor::gaussian(cfg, i, 0), AttnTensor::gaussian(cfg, i, 1), cfg);
    const auto back = io::decode_attn_map(io::encode(map));
    ASSERT_EQ(back.data().size(), map.data().size());
    EXPECT_EQ(std::memcmp(back.data().data(), map.data().data(), map.data().size() * 4), 0);
  }
}

TEST(RoundTrip, Files) {
  const auto cfg = AttnConfig::make(1, 2, 12, 4, 4);
  const auto t = AttnTensor::gaussian(cfg, 3);
  const auto mask = testing::random_mask(cfg, 0.5, 4);
  const auto tp = temp_path("t.fgt"), mp = temp_path("m.fgm");
  io::write_tensor(tp.string(), t);
  io::write_mask(mp.string(), mask);
  EXPECT_EQ(io::read_tensor(tp.string()), t);
  EXPECT_EQ(io::read_mask(mp.string()), mask);
  std::filesystem::remove(tp);
  std::filesystem::remove(mp);
  EXPECT_ANY_THROW(io::read_file(temp_path("missing").string()));
}

TEST(Corruption, EveryTruncationRejected) {
  const auto cfg = AttnConfig::make(1, 1, 3, 2, 2);
  const auto tensor_bytes = io::encode(AttnTensor::gaussian(cfg, 5));
  const auto mask_bytes = io::encode(testing::random_mask(cfg, 0.5, 6));
  for (std::size_t len = 0; len < tensor_bytes.size(); ++len)
    EXPECT_THROW(io::decode_tensor(std::span(tensor_bytes).first(len)), FormatError) << len;
  for (std::size_t len = 0; len < mask_bytes.size(); ++len)
    EXPECT_THROW(io::decode_mask(std::span(mask_bytes).first(len)), FormatError) << len;
}

TEST(Corruption, TrailingBytesRejected) {
  auto bytes = io::encode(AttnTensor::zeros(AttnConfig::make(1, 1, 2, 2, 2)));
  bytes.push_back(0);
  EXPECT_THROW(io::decode_tensor(bytes), CorruptionError);
}

TEST(Corruption, BadMagicVersionAndDtype) {
  const auto good = io::encode(AttnTensor::zeros(AttnConfig::make(1, 1, 2, 2, 2)));
  auto bad = good;
  bad[0] = 'X';
  EXPECT_THROW(io::decode_tensor(bad), FormatError);
  bad = good;
  bad[4] = 9;
  EXPECT_THROW(io::decode_tensor(bad), FormatError);
  bad = good;
  bad[6] = 1;
  EXPECT_THROW(io::decode_tensor(bad), FormatError);
  EXPECT_THROW(io::decode_mask(good), FormatError);
}

TEST(Corruption, SemanticViolationsRejected) {
  // Unsorted indices and an out-of-range key inside an otherwise well-formed mask file.
  Bytes bytes = {'F', 'G', 'M', '1'};
  put_le(bytes, 1, 2);
  for (std::uint64_t v : {1, 1, 1, 4, 4}) put_le(bytes, v, 8);
  put_le(bytes, 2, 4);
  put_le(bytes, 3, 4);
  put_le(bytes, 1, 4);
  EXPECT_THROW(io::decode_mask(bytes), FormatError);
  bytes.resize(bytes.size() - 8);
  put_le(bytes, 1, 4);
  put_le(bytes, 9, 4);
  EXPECT_THROW(io::decode_mask(bytes), FormatError);

  // A map row summing above one.
  const std::vector<std::uint64_t> dims = {1, 1, 2, 2};
  EXPECT_ANY_THROW(io::decode_attn_map(io::encode_tensor(dims, std::vector<float>{0.9f, 0.9f, 0.5f, 0.5f})));
}

TEST(GoldenFixture, StableBytesAndChecksum) {
  const auto bytes = io::read_file(std::string(FGATTN_FIXTURE_DIR) + "/golden_q.fgt");
  EXPECT_EQ(bytes.size(), 1068u);
  EXPECT_EQ(io::fnv1a64(bytes), 0x163ad06ea90eecf4ull);
  const auto cfg = AttnConfig::make(1, 2, 16, 8, 8);
  EXPECT_EQ(io::decode_attn_tensor(bytes), AttnTensor::gaussian(cfg, 2026, 0));
}

TEST(Checksum, KnownFnvVectors) {
  EXPECT_EQ(io::fnv1a64({}), 0xcbf29ce484222325ull);
  const std::uint8_t a[] = {'a'};
  EXPECT_EQ(io::fnv1a64(a), 0xaf63dc4c8601ec8cull);
}

}  // namespace
}  // namespace fgattn

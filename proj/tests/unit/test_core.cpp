// Copyright 2026 The fgattn Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <bit>
#include <cmath>
#include <random>

#include "fgattn/bf16.hpp"
#include "fgattn/config.hpp"
#include "fgattn/errors.hpp"
#include "fgattn/random.hpp"
#include "fgattn/tensor.hpp"
#include "reference.hpp"

namespace fgattn {
namespace {

TEST(AttnConfig, DefaultScaleIsInverseSqrtD) {
  for (std::size_t d : {1u, 3u, 64u, 128u}) {
    const auto cfg = AttnConfig::make(1, 1, 256, d, 128);
    EXPECT_NEAR(cfg.scale * std::sqrt(static_cast<double>(d)), 1.0, 1e-12);
  }
}

TEST(AttnConfig, RejectsBadGeometry) {
  EXPECT_THROW(AttnConfig::make(0, 1, 8, 4, 4), ShapeError);
  EXPECT_THROW(AttnConfig::make(1, 1, 8, 0, 4), ShapeError);
  EXPECT_THROW(AttnConfig::make(1, 1, 8, 4, 16), ShapeError);  // M > N
  auto cfg = AttnConfig::make(1, 1, 8, 4, 4);
  cfg.scale = 0.0;
  EXPECT_THROW(cfg.validate(), ShapeError);
}

TEST(AttnConfig, PartialLastGroup) {
  const auto cfg = AttnConfig::make(1, 1, 10, 4, 4);
  EXPECT_EQ(cfg.num_groups(), 3u);
  EXPECT_EQ(cfg.group_rows(0), 4u);
  EXPECT_EQ(cfg.group_rows(2), 2u);
  EXPECT_EQ(cfg.group_end(2), 10u);
}

TEST(AttnTensor, ZerosHasStatedDims) {
  const auto cfg = AttnConfig::make(1, 1, 2, 2, 1);
  const auto t = AttnTensor::zeros(cfg);
  EXPECT_EQ(t.dims(), (Dims4{1, 1, 2, 2}));
  ASSERT_EQ(t.data().size(), 4u);
  for (float x : t.data()) EXPECT_EQ(x, 0.0f);
}

TEST(AttnTensor, GaussianIsReproduciblePerSeed) {
  const auto cfg = AttnConfig::make(2, 3, 16, 8, 4);
  const auto a = AttnTensor::gaussian(cfg, 7);
  const auto b = AttnTensor::gaussian(cfg, 7);
  const auto c = AttnTensor::gaussian(cfg, 8);
  EXPECT_EQ(a, b);
  std::size_t differing = 0;
  for (std::size_t i = 0; i < a.data().size(); ++i) differing += a.data()[i] != c.data()[i];
  EXPECT_GE(differing, 1u);
}

TEST(AttnTensor, FromDataChecksLengthAndFiniteness) {
  const auto cfg = AttnConfig::make(1, 1, 2, 2, 1);
  EXPECT_THROW(AttnTensor::from_data(cfg, std::vector<float>(3)), ShapeError);
  EXPECT_THROW(AttnTensor::from_data(cfg, {0.0f, NAN, 0.0f, 0.0f}), NumericError);
  EXPECT_THROW(AttnTensor::from_data(cfg, {0.0f, INFINITY, 0.0f, 0.0f}), NumericError);
}

TEST(AttnTensor, RowMajorOffsetRoundTrip) {
  const auto cfg = AttnConfig::make(2, 3, 5, 4, 5);
  std::mt19937_64 rng(3);
  std::vector<float> data(2 * 3 * 5 * 4, 0.0f);
  struct Coord { std::size_t b, h, n, d; float value; };
  std::vector<Coord> written;
  for (int trial = 0; trial < 50; ++trial) {
    Coord c{rng() % 2, rng() % 3, rng() % 5, rng() % 4, static_cast<float>(trial + 1)};
    data[((c.b * 3 + c.h) * 5 + c.n) * 4 + c.d] = c.value;
    std::erase_if(written, [&](const Coord& o) {
      return o.b == c.b && o.h == c.h && o.n == c.n && o.d == c.d;
    });
    written.push_back(c);
  }
  const auto t = AttnTensor::from_data(cfg, data);
  for (const auto& c : written) {
    EXPECT_EQ(t.at(c.b, c.h, c.n, c.d), c.value);
    EXPECT_EQ(t.row(c.b, c.h, c.n)[c.d], c.value);
  }
}

// First draws of GaussianStream(seed 7, stream 0), frozen on first run.
// mt19937_64 is fully specified by the standard, so these are portable up
// to libm's log/sin/cos.
TEST(GaussianStream, CommittedTestVectors) {
  GaussianStream rng(7, 0);
  const double expected[] = {-0.25260928757857509, -0.52893421491681358, 0.92548342563244235,
                             -1.6492848143118517, -1.6104317375898334, 0.74389354054953016};
  for (double e : expected) EXPECT_NEAR(rng.next(), e, 1e-12);
}

TEST(GaussianStream, MomentsAreStandardNormal) {
  GaussianStream rng(11, 0);
  const int n = 200000;
  double sum = 0, sq = 0;
  for (int i = 0; i < n; ++i) {
    const double x = rng.next();
    sum += x;
    sq += x * x;
  }
  EXPECT_NEAR(sum / n, 0.0, 0.01);
  EXPECT_NEAR(sq / n, 1.0, 0.01);
}

TEST(RoundBf16, ExactValuesPassThrough) {
  EXPECT_EQ(round_bf16(1.0f), 1.0f);
  EXPECT_EQ(round_bf16(-2.5f), -2.5f);
  EXPECT_EQ(round_bf16(0.0f), 0.0f);
  EXPECT_EQ(round_bf16(INFINITY), INFINITY);
  EXPECT_EQ(round_bf16(-INFINITY), -INFINITY);
  EXPECT_TRUE(std::isnan(round_bf16(NAN)));
}

TEST(RoundBf16, BelowMantissaResolutionRoundsAway) {
  const float x = 1.0f + std::ldexp(1.0f, -9);
  EXPECT_EQ(ref::bf16_oracle(x), 1.0f);
  EXPECT_EQ(round_bf16(x), 1.0f);
  // Exactly half an ulp: ties to even keeps 1.0, but 1 + 3*2^-8 goes up.
  EXPECT_EQ(round_bf16(1.0f + std::ldexp(1.0f, -8)), 1.0f);
  EXPECT_EQ(round_bf16(1.0f + 3 * std::ldexp(1.0f, -8)), 1.0f + std::ldexp(1.0f, -6));
}

TEST(RoundBf16, MatchesBitLevelOracleAndIsIdempotent) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<float> mag(-30.0f, 30.0f);
  std::uniform_int_distribution<int> exp2(-60, 60);
  for (int i = 0; i < 20000; ++i) {
    const float x = std::ldexp(mag(rng), exp2(rng));
    const float r = round_bf16(x);
    ASSERT_EQ(std::bit_cast<std::uint32_t>(r), std::bit_cast<std::uint32_t>(ref::bf16_oracle(x)))
        << "x = " << x;
    ASSERT_EQ(round_bf16(r), r);
    ASSERT_EQ(std::bit_cast<std::uint32_t>(r) & 0xffffu, 0u);
  }
}

TEST(AttnMap, RejectsScoresOutsideUnitInterval) {
  EXPECT_THROW(AttnMap(1, 1, 2, {0.5f, 0.5f, 1.5f, 0.0f}), NumericError);
  EXPECT_THROW(AttnMap(1, 1, 2, {0.7f, 0.7f, 0.5f, 0.5f}), NumericError);
  EXPECT_NO_THROW(AttnMap(1, 1, 2, {0.5f, 0.5f, 0.25f, 0.0f}));
}

}  // namespace
}  // namespace fgattn

// Copyright 2026 The fgattn Authors
// SPDX-License-Identifier: Apache-2.0

#include <benchmark/benchmark.h>

#include <numeric>
#include <random>

#include "fgattn/fg_sparse.hpp"
#include "fgattn/gather.hpp"
#include "fgattn/masks.hpp"
#include "fgattn/oracle.hpp"
#include "fgattn/perfmodel.hpp"
#include "fgattn/tiled.hpp"

namespace {

using namespace fgattn;

struct Inputs {
  AttnConfig cfg;
  AttnTensor q, k, v;
};

Inputs make_inputs(std::size_t n) {
  const auto cfg = AttnConfig::make(1, 2, n, 64, 64);
  return {cfg, AttnTensor::gaussian(cfg, 1, 0), AttnTensor::gaussian(cfg, 1, 1),
          AttnTensor::gaussian(cfg, 1, 2)};
}

// Every group keeps the same strided fraction of keys.
SparseIndexMask strided_mask(const AttnConfig& cfg, double density) {
  const std::size_t keep = std::max<std::size_t>(1, static_cast<std::size_t>(density * cfg.seq_len));
  std::vector<std::vector<std::uint32_t>> lists(cfg.batch * cfg.heads * cfg.num_groups());
  for (auto& list : lists)
    for (std::size_t t = 0; t < keep; ++t) list.push_back(static_cast<std::uint32_t>(t * cfg.seq_len / keep));
  return SparseIndexMask(cfg.batch, cfg.heads, cfg.seq_len, cfg.group_size, std::move(lists));
}

void BM_Dense(benchmark::State& state) {
  const auto in = make_inputs(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(dense_attention(in.q, in.k, in.v, in.cfg));
}
BENCHMARK(BM_Dense)->Arg(256)->Arg(512)->Arg(1024)->Unit(benchmark::kMillisecond);

void BM_Flash(benchmark::State& state) {
  const auto in = make_inputs(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(flash_attention(in.q, in.k, in.v, in.cfg));
}
BENCHMARK(BM_Flash)->Arg(256)->Arg(512)->Arg(1024)->Unit(benchmark::kMillisecond);

// range(1) is density in percent.
void BM_Sparse(benchmark::State& state) {
  const auto in = make_inputs(static_cast<std::size_t>(state.range(0)));
  const auto mask = strided_mask(in.cfg, static_cast<double>(state.range(1)) / 100.0);
  for (auto _ : state) benchmark::DoNotOptimize(fg_sparse_attention(in.q, in.k, in.v, mask, in.cfg));
  state.counters["density"] = mask_density(mask);
}
BENCHMARK(BM_Sparse)
    ->ArgsProduct({{1024}, {100, 50, 25, 10}})
    ->Unit(benchmark::kMillisecond);

void BM_Gather(benchmark::State& state) {
  const std::size_t n = 4096, d = 64, rows = static_cast<std::size_t>(state.range(0));
  std::vector<float> matrix(n * d);
  std::iota(matrix.begin(), matrix.end(), 0.0f);
  std::mt19937_64 rng(7);
  std::vector<std::uint32_t> idx(rows);
  for (auto& i : idx) i = static_cast<std::uint32_t>(rng() % n);
  PackedTile tile;
  for (auto _ : state) {
    gather_rows_into(matrix, n, d, idx, tile);
    benchmark::DoNotOptimize(tile.rows.data());
  }
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * rows * d * sizeof(float)));
}
BENCHMARK(BM_Gather)->Arg(16)->Arg(64)->Arg(128);

void BM_MaskCached(benchmark::State& state) {
  auto in = make_inputs(512);
  in.cfg.scale = 1.0;
  const auto map = attention_map(in.q, in.k, in.cfg);
  for (auto _ : state) benchmark::DoNotOptimize(build_mask_cached(map, in.cfg, 0.5 / 512));
}
BENCHMARK(BM_MaskCached)->Unit(benchmark::kMillisecond);

void BM_SimulatePipeline(benchmark::State& state) {
  const auto in = make_inputs(1024);
  const auto trace = sparse_schedule(in.cfg, strided_mask(in.cfg, 0.3));
  const auto params = default_pipeline_params();
  for (auto _ : state) benchmark::DoNotOptimize(simulate_pipeline(trace, params));
}
BENCHMARK(BM_SimulatePipeline);

}  // namespace

BENCHMARK_MAIN();

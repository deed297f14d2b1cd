// Copyright 2026 The fgattn Authors
// SPDX-License-Identifier: Apache-2.0

#include "fgattn/perfmodel.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "fgattn/errors.hpp"
#include "fgattn/fg_sparse.hpp"
#include "fgattn/tiled.hpp"

namespace fgattn {
namespace {

std::uint64_t element_bytes(Precision p) { return p == Precision::kBf16 ? 2 : 4; }

void fill_flops(CostReport& report, std::uint64_t score_pairs, std::uint64_t dim) {
  report.flops_scores = 2 * score_pairs * dim;
  report.flops_output = 2 * score_pairs * dim;
  report.flops_softmax = kSoftmaxFlopsPerScore * score_pairs;
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

}  // namespace

void PipelineParams::validate() const {
  if (pipeline_depth == 0) throw std::invalid_argument("pipeline_depth must be >= 1");
}

PipelineParams default_pipeline_params() {
  PipelineParams p;
  p.load_cycles = 600;
  p.compute_cycles = 1100;
  p.addrgen_cycles = 200;
  p.pipeline_depth = 2;
  return p;
}

PipelineParams parse_pipeline_params(std::string_view text) {
  PipelineParams p = default_pipeline_params();
  std::size_t line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const auto eol = text.find('\n');
    std::string_view line = text.substr(0, eol);
    text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw FormatError("profile line " + std::to_string(line_no) + ": expected key = value");
    }
    const auto key = trim(line.substr(0, eq));
    const auto val = trim(line.substr(eq + 1));
    std::uint64_t number = 0;
    const auto [ptr, ec] = std::from_chars(val.data(), val.data() + val.size(), number);
    if (ec != std::errc() || ptr != val.data() + val.size()) {
      throw FormatError("profile line " + std::to_string(line_no) + ": bad integer '" +
                        std::string(val) + "'");
    }
    if (key == "load_cycles") {
      p.load_cycles = number;
    } else if (key == "compute_cycles") {
      p.compute_cycles = number;
    } else if (key == "addrgen_cycles") {
      p.addrgen_cycles = number;
    } else if (key == "pipeline_depth") {
      p.pipeline_depth = number;
    } else {
      throw FormatError("profile line " + std::to_string(line_no) + ": unknown key '" +
                        std::string(key) + "'");
    }
  }
  p.validate();
  return p;
}

PipelineParams load_pipeline_params(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open profile '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_pipeline_params(buf.str());
}

CostReport count_flops(const AttnConfig& cfg) {
  cfg.validate();
  const std::uint64_t bh = cfg.batch * cfg.heads;
  const std::uint64_t n = cfg.seq_len;
  const std::uint64_t dim = cfg.head_dim;
  const std::uint64_t elt = element_bytes(cfg.precision);
  CostReport report;
  fill_flops(report, bh * n * n, dim);
  report.bytes_qkv = bh * (n * dim * elt + 2 * cfg.num_groups() * n * dim * elt);
  report.bytes_mask = 0;
  report.density = 1.0;
  return report;
}

CostReport count_flops(const AttnConfig& cfg, const SparseIndexMask& mask) {
  cfg.validate();
  mask.check_compatible(cfg);
  const std::uint64_t dim = cfg.head_dim;
  const std::uint64_t elt = element_bytes(cfg.precision);
  std::uint64_t pairs = 0;
  for (std::size_t b = 0; b < cfg.batch; ++b) {
    for (std::size_t h = 0; h < cfg.heads; ++h) {
      for (std::size_t g = 0; g < cfg.num_groups(); ++g) {
        pairs += static_cast<std::uint64_t>(cfg.group_rows(g)) * mask.keys(b, h, g).size();
      }
    }
  }
  const std::uint64_t entries = mask.total_entries();
  CostReport report;
  fill_flops(report, pairs, dim);
  report.bytes_qkv = cfg.batch * cfg.heads * cfg.seq_len * dim * elt + 2 * entries * dim * elt;
  report.bytes_mask = kMaskIndexBytes * entries;
  report.density = mask_density(mask);

  const CostReport dense = count_flops(cfg);
  report.flop_ratio_matmul =
      static_cast<double>(dense.flops_matmul()) / static_cast<double>(report.flops_matmul());
  report.flop_ratio_with_softmax =
      static_cast<double>(dense.flops_total()) / static_cast<double>(report.flops_total());
  return report;
}

CostReport trace_flops(const ExecutionTrace& trace) {
  std::uint64_t pairs = 0;
  for (const auto& e : trace.events) {
    if (e.kind == EventKind::kTileCompute) {
      pairs += static_cast<std::uint64_t>(e.query_rows) * e.key_rows;
    }
  }
  CostReport report;
  fill_flops(report, pairs, trace.head_dim);
  return report;
}

std::uint64_t simulate_pipeline(const ExecutionTrace& trace, const PipelineParams& params) {
  params.validate();
  std::vector<std::uint64_t> load_cost;
  load_cost.reserve(trace.events.size() / 2);
  for (const auto& e : trace.events) {
    if (e.kind == EventKind::kTileLoad) {
      load_cost.push_back(params.load_cycles);
    } else if (e.kind == EventKind::kGather) {
      load_cost.push_back(params.addrgen_cycles + params.load_cycles);
    }
  }

  const std::size_t tiles = load_cost.size();
  const std::size_t depth = params.pipeline_depth;
  std::vector<std::uint64_t> load_done(tiles), compute_done(tiles);
  for (std::size_t t = 0; t < tiles; ++t) {
    // The buffer for tile t is released when tile t - depth - 1 finishes computing.
    std::uint64_t start = t > 0 ? load_done[t - 1] : 0;
    if (t > depth) start = std::max(start, compute_done[t - depth - 1]);
    load_done[t] = start + load_cost[t];
    const std::uint64_t ready = t > 0 ? std::max(compute_done[t - 1], load_done[t]) : load_done[t];
    compute_done[t] = ready + params.compute_cycles;
  }
  return tiles == 0 ? 0 : compute_done.back();
}

double projected_speedup(const AttnConfig& cfg, const SparseIndexMask& mask,
                         const PipelineParams& params) {
  const auto dense = simulate_pipeline(dense_schedule(cfg), params);
  const auto sparse = simulate_pipeline(sparse_schedule(cfg, mask), params);
  if (sparse == 0) return 1.0;  // all-zero cost profile
  return static_cast<double>(dense) / static_cast<double>(sparse);
}

CostReport bench(const AttnConfig& cfg, const SparseIndexMask& mask, const PipelineParams& params) {
  CostReport report = count_flops(cfg, mask);
  const auto dense = simulate_pipeline(dense_schedule(cfg), params);
  report.modeled_cycles = simulate_pipeline(sparse_schedule(cfg, mask), params);
  report.projected_speedup =
      report.modeled_cycles == 0
          ? 1.0
          : static_cast<double>(dense) / static_cast<double>(report.modeled_cycles);
  return report;
}

}  // namespace fgattn

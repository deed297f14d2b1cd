// Copyright 2026 The fgattn Authors
// SPDX-License-Identifier: Apache-2.0
//
// fgattn: command-line front end for the attention engine.
//
//   fgattn gen       write q/k/v tensors
//   fgattn attn      run dense, flash or sparse attention
//   fgattn mask      build a sparse index mask
//   fgattn sparsity  block and slice sparsity of a map
//   fgattn sweep     threshold sweep (density, cycles, error)
//   fgattn bench     cost report for a mask
//   fgattn compare   max-abs / max-rel difference of two tensors
//
// Exit codes: 0 success, 1 tolerance or assertion failure, 2 usage or format error.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "fgattn/errors.hpp"
#include "fgattn/fg_sparse.hpp"
#include "fgattn/io.hpp"
#include "fgattn/masks.hpp"
#include "fgattn/oracle.hpp"
#include "fgattn/perfmodel.hpp"
#include "fgattn/sweep.hpp"
#include "fgattn/tiled.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace fgattn;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitUsage = 2;

// Usage problems found after flag parsing.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct QkvArgs {
  std::string dir;
  std::string q, k, v;
  std::size_t m = 128;
  std::string precision = "full";
  double scale = 0.0;

  void add_to(CLI::App* cmd) {
    cmd->add_option("--qkv", dir, "Directory holding q.fgt, k.fgt, v.fgt");
    cmd->add_option("--q", q, "Query tensor file");
    cmd->add_option("--k", k, "Key tensor file");
    cmd->add_option("--v", v, "Value tensor file");
    cmd->add_option("--m", m, "Query group size M (clipped to N)")->check(CLI::PositiveNumber);
    cmd->add_option("--precision", precision, "full | bf16");
    cmd->add_option("--scale", scale, "Score scale (default 1/sqrt(D))");
  }

  std::string path(const std::string& explicit_path, const char* name) const {
    if (!explicit_path.empty()) return explicit_path;
    if (dir.empty()) throw UsageError(std::string("missing --") + name + " (or --qkv DIR)");
    return (fs::path(dir) / (std::string(name) + ".fgt")).string();
  }

  AttnTensor load(const std::string& explicit_path, const char* name) const {
    return io::read_tensor(path(explicit_path, name));
  }

  AttnConfig config_for(const Dims4& d) const {
    AttnConfig cfg = AttnConfig::make(d.batch, d.heads, d.rows, d.cols, std::min(m, d.rows),
                                      parse_precision(precision));
    if (scale > 0.0) cfg.scale = scale;
    cfg.validate();
    return cfg;
  }
};

void print_json(const json& j) { std::cout << j.dump() << '\n'; }

json trace_json(const ExecutionTrace& t) {
  json events = json::array();
  for (const auto& e : t.events) {
    const char* kind = e.kind == EventKind::kTileLoad ? "load"
                       : e.kind == EventKind::kGather ? "gather"
                                                      : "compute";
    events.push_back({{"kind", kind}, {"b", e.batch}, {"h", e.head}, {"g", e.group},
                      {"rows", e.query_rows}, {"keys", e.key_rows}});
  }
  return {{"head_dim", t.head_dim},
          {"loads", t.count(EventKind::kTileLoad)},
          {"gathers", t.count(EventKind::kGather)},
          {"computes", t.count(EventKind::kTileCompute)},
          {"peak_scratch_floats", t.peak_scratch_floats},
          {"events", events}};
}

json report_json(const CostReport& r) {
  return {{"flops_scores", r.flops_scores},
          {"flops_output", r.flops_output},
          {"flops_softmax", r.flops_softmax},
          {"bytes_qkv", r.bytes_qkv},
          {"bytes_mask", r.bytes_mask},
          {"modeled_cycles", r.modeled_cycles},
          {"density", r.density},
          {"projected_speedup", r.projected_speedup},
          {"flop_ratio_matmul", r.flop_ratio_matmul},
          {"flop_ratio_with_softmax", r.flop_ratio_with_softmax}};
}

PipelineParams params_from(const std::string& path) {
  return path.empty() ? default_pipeline_params() : load_pipeline_params(path);
}

std::vector<std::size_t> parse_blocks(const std::string& text) {
  std::vector<std::size_t> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t pos = 0;
    const unsigned long value = std::stoul(item, &pos);
    if (pos != item.size() || value == 0) throw UsageError("bad block size '" + item + "'");
    out.push_back(value);
  }
  if (out.empty()) throw UsageError("--blocks is empty");
  return out;
}

// ---- gen -------------------------------------------------------------------

struct GenArgs {
  std::size_t b = 1, h = 1, n = 256, d = 64;
  std::uint64_t seed = 0;
  std::string out = ".";
};

int run_gen(const GenArgs& a) {
  const AttnConfig cfg = AttnConfig::make(a.b, a.h, a.n, a.d, a.n);
  fs::create_directories(a.out);
  json files = json::object();
  const char* names[] = {"q", "k", "v"};
  for (std::uint64_t s = 0; s < 3; ++s) {
    const auto path = (fs::path(a.out) / (std::string(names[s]) + ".fgt")).string();
    io::write_tensor(path, AttnTensor::gaussian(cfg, a.seed, s));
    files[names[s]] = path;
  }
  print_json({{"command", "gen"}, {"seed", a.seed}, {"dims", {a.b, a.h, a.n, a.d}}, {"files", files}});
  return kExitOk;
}

// ---- attn ------------------------------------------------------------------

struct AttnArgs {
  QkvArgs in;
  std::string mode = "dense";
  std::string mask;
  std::string out;
  std::string trace;
};

int run_attn(const AttnArgs& a) {
  if (a.mode == "sparse" && a.mask.empty()) throw UsageError("--mode sparse requires --mask");
  if (a.mode == "dense" && !a.trace.empty()) throw UsageError("--trace needs --mode flash or sparse");
  const auto q = a.in.load(a.in.q, "q");
  const auto k = a.in.load(a.in.k, "k");
  const auto v = a.in.load(a.in.v, "v");
  const auto cfg = a.in.config_for(q.dims());

  ExecutionTrace trace;
  ExecutionTrace* tp = a.trace.empty() ? nullptr : &trace;
  AttnTensor out;
  if (a.mode == "dense") {
    out = dense_attention(q, k, v, cfg);
  } else if (a.mode == "flash") {
    out = flash_attention(q, k, v, cfg, tp);
  } else if (a.mode == "sparse") {
    out = fg_sparse_attention(q, k, v, io::read_mask(a.mask), cfg, tp);
  } else {
    throw UsageError("unknown --mode '" + a.mode + "'");
  }
  if (!a.out.empty()) io::write_tensor(a.out, out);
  if (tp != nullptr) std::ofstream(a.trace) << trace_json(trace).dump() << '\n';
  print_json({{"command", "attn"}, {"mode", a.mode}, {"precision", to_string(cfg.precision)},
              {"group_size", cfg.group_size}, {"out", a.out}});
  return kExitOk;
}

// ---- mask ------------------------------------------------------------------

struct MaskArgs {
  QkvArgs in;
  std::string strategy = "cached";
  std::string tau = "0.5/N";
  std::size_t topk = 0;
  std::size_t refresh = 15;
  std::string out;
};

int run_mask(const MaskArgs& a) {
  const auto q = a.in.load(a.in.q, "q");
  const auto k = a.in.load(a.in.k, "k");
  const auto cfg = a.in.config_for(q.dims());
  MaskBuilderConfig builder;
  builder.strategy = parse_strategy(a.strategy);
  builder.refresh_interval = a.refresh;
  if (builder.strategy == MaskStrategy::kAvgQueryTopK) {
    if (a.topk == 0) throw UsageError("--strategy avgq-topk requires --topk");
    builder.top_k = a.topk;
  } else {
    builder.tau = parse_threshold(a.tau, cfg.seq_len);
  }
  const auto mask = build_mask(q, k, cfg, builder);
  if (!a.out.empty()) io::write_mask(a.out, mask);
  json j = {{"command", "mask"},
            {"strategy", to_string(builder.strategy)},
            {"group_size", cfg.group_size},
            {"groups", mask.groups()},
            {"entries", mask.total_entries()},
            {"density", mask_density(mask)},
            {"out", a.out}};
  if (builder.strategy == MaskStrategy::kAvgQueryTopK) {
    j["top_k"] = builder.top_k;
  } else {
    j["tau"] = builder.tau;
  }
  print_json(j);
  return kExitOk;
}

// ---- sparsity --------------------------------------------------------------

struct SparsityArgs {
  QkvArgs in;
  std::string map;
  std::string blocks = "16,32,64,128";
  std::string tau = "0.5/N";
};

int run_sparsity(const SparsityArgs& a) {
  std::optional<AttnMap> map;
  AttnConfig cfg;
  if (!a.map.empty()) {
    map = io::read_map(a.map);
    // D is irrelevant for map analysis.
    cfg = AttnConfig::make(map->batch(), map->heads(), map->seq_len(), 1,
                           std::min(a.in.m, map->seq_len()), parse_precision(a.in.precision));
  } else {
    const auto q = a.in.load(a.in.q, "q");
    const auto k = a.in.load(a.in.k, "k");
    cfg = a.in.config_for(q.dims());
    map = attention_map(q, k, cfg);
  }
  const double tau = parse_threshold(a.tau, cfg.seq_len);

  std::printf("Block size,Sparsity\n");
  bool monotone = true;
  double prev = 1.0;
  for (std::size_t block : parse_blocks(a.blocks)) {
    if (block > cfg.seq_len) continue;
    const double s = block_sparsity(*map, block, tau);
    std::printf("%zux%zu,%.4f%%\n", block, block, 100.0 * s);
    if (cfg.seq_len % block == 0) {
      if (s > prev) monotone = false;
      prev = s;
    }
  }
  std::printf("%zux1,%.4f%%\n", cfg.group_size, 100.0 * slice_sparsity(*map, cfg, tau));
  if (!monotone) {
    std::fprintf(stderr, "fgattn: block sparsity is not monotone across block sizes\n");
    return kExitCheckFailed;
  }
  return kExitOk;
}

// ---- sweep -----------------------------------------------------------------

struct SweepArgs {
  QkvArgs in;
  std::string tau_from = "0.1/N";
  std::string tau_to = "1/N";
  std::size_t steps = 10;
  std::string params;
  std::string out;
};

int run_sweep(const SweepArgs& a) {
  const auto q = a.in.load(a.in.q, "q");
  const auto k = a.in.load(a.in.k, "k");
  const auto v = a.in.load(a.in.v, "v");
  const auto cfg = a.in.config_for(q.dims());
  const auto rows = threshold_sweep(q, k, v, cfg, parse_threshold(a.tau_from, cfg.seq_len),
                                    parse_threshold(a.tau_to, cfg.seq_len), a.steps,
                                    params_from(a.params));
  const std::string csv = sweep_csv(rows);
  if (a.out.empty()) {
    std::cout << csv;
  } else {
    std::ofstream(a.out) << csv;
  }
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i].density > rows[i - 1].density ||
        rows[i].modeled_cycles > rows[i - 1].modeled_cycles) {
      std::fprintf(stderr, "fgattn: density or cycles increased at tau=%g\n", rows[i].tau);
      return kExitCheckFailed;
    }
  }
  return kExitOk;
}

// ---- bench -----------------------------------------------------------------

struct BenchArgs {
  std::string mask;
  std::string params;
  std::size_t d = 64;
  std::string precision = "full";
};

int run_bench(const BenchArgs& a) {
  const auto mask = io::read_mask(a.mask);
  const auto cfg = AttnConfig::make(mask.batch(), mask.heads(), mask.seq_len(), a.d,
                                    mask.group_size(), parse_precision(a.precision));
  json j = report_json(bench(cfg, mask, params_from(a.params)));
  j["command"] = "bench";
  print_json(j);
  return kExitOk;
}

// ---- compare ---------------------------------------------------------------

struct CompareArgs {
  std::string a, b;
  double tol = 1e-4;
};

int run_compare(const CompareArgs& c) {
  const auto a = io::read_file(c.a);
  const auto b = io::read_file(c.b);
  const auto ta = io::decode_tensor(a);
  const auto tb = io::decode_tensor(b);
  if (ta.dims != tb.dims) throw UsageError("tensors have different shapes");
  double max_abs = 0.0, max_rel = 0.0;
  for (std::size_t i = 0; i < ta.data.size(); ++i) {
    const double x = ta.data[i], y = tb.data[i];
    const double diff = std::abs(x - y);
    max_abs = std::max(max_abs, diff);
    const double mag = std::max(std::abs(x), std::abs(y));
    if (mag > 0.0) max_rel = std::max(max_rel, diff / mag);
  }
  const bool ok = max_abs <= c.tol;
  print_json({{"command", "compare"}, {"max_abs", max_abs}, {"max_rel", max_rel},
              {"tol", c.tol}, {"within_tol", ok}});
  return ok ? kExitOk : kExitCheckFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fgattn: slice-granular sparse attention reference engine"};
  app.require_subcommand(1);

  GenArgs gen;
  auto* gen_cmd = app.add_subcommand("gen", "Write gaussian q/k/v tensors");
  gen_cmd->set_help_flag("--help", "Print this help message and exit");
  gen_cmd->add_option("--b", gen.b, "Batch")->check(CLI::PositiveNumber);
  gen_cmd->add_option("--h", gen.h, "Heads")->check(CLI::PositiveNumber);
  gen_cmd->add_option("--n", gen.n, "Sequence length")->check(CLI::PositiveNumber);
  gen_cmd->add_option("--d", gen.d, "Head dimension")->check(CLI::PositiveNumber);
  gen_cmd->add_option("--seed", gen.seed, "RNG seed");
  gen_cmd->add_option("--out", gen.out, "Output directory");

  AttnArgs attn;
  auto* attn_cmd = app.add_subcommand("attn", "Run attention on q/k/v");
  attn.in.add_to(attn_cmd);
  attn_cmd->add_option("--mode", attn.mode, "dense | flash | sparse")
      ->check(CLI::IsMember({"dense", "flash", "sparse"}));
  attn_cmd->add_option("--mask", attn.mask, "Mask file (sparse mode)");
  attn_cmd->add_option("--out", attn.out, "Output tensor file");
  attn_cmd->add_option("--trace", attn.trace, "Write the execution trace as JSON");

  MaskArgs mask;
  auto* mask_cmd = app.add_subcommand("mask", "Build a sparse index mask");
  mask.in.add_to(mask_cmd);
  mask_cmd->add_option("--strategy", mask.strategy, "cached | avgq | avgq-topk")
      ->check(CLI::IsMember({"cached", "avgq", "avgq-topk"}));
  mask_cmd->add_option("--tau", mask.tau, "Threshold, absolute or x/N");
  mask_cmd->add_option("--topk", mask.topk, "Keys per group (avgq-topk)");
  mask_cmd->add_option("--refresh", mask.refresh, "Refresh interval")->check(CLI::PositiveNumber);
  mask_cmd->add_option("--out", mask.out, "Output mask file");

  SparsityArgs sparsity;
  auto* sparsity_cmd = app.add_subcommand("sparsity", "Block and slice sparsity table");
  sparsity.in.add_to(sparsity_cmd);
  sparsity_cmd->add_option("--map", sparsity.map, "Attention map file");
  sparsity_cmd->add_option("--blocks", sparsity.blocks, "Comma-separated block sizes");
  sparsity_cmd->add_option("--tau", sparsity.tau, "Threshold, absolute or x/N");

  SweepArgs sweep;
  auto* sweep_cmd = app.add_subcommand("sweep", "Cached-threshold sweep as CSV");
  sweep.in.add_to(sweep_cmd);
  sweep_cmd->add_option("--tau-from", sweep.tau_from, "First threshold");
  sweep_cmd->add_option("--tau-to", sweep.tau_to, "Last threshold");
  sweep_cmd->add_option("--steps", sweep.steps, "Number of thresholds")->check(CLI::PositiveNumber);
  sweep_cmd->add_option("--params", sweep.params, "Pipeline profile file");
  sweep_cmd->add_option("--out", sweep.out, "CSV output file (default stdout)");

  BenchArgs bench_args;
  auto* bench_cmd = app.add_subcommand("bench", "Cost report for a mask");
  bench_cmd->add_option("--mask", bench_args.mask, "Mask file")->required();
  bench_cmd->add_option("--params", bench_args.params, "Pipeline profile file");
  bench_cmd->add_option("--d", bench_args.d, "Head dimension")->check(CLI::PositiveNumber);
  bench_cmd->add_option("--precision", bench_args.precision, "full | bf16");

  CompareArgs compare;
  auto* compare_cmd = app.add_subcommand("compare", "Compare two tensor files");
  compare_cmd->add_option("--a", compare.a, "First tensor")->required();
  compare_cmd->add_option("--b", compare.b, "Second tensor")->required();
  compare_cmd->add_option("--tol", compare.tol, "Max-abs tolerance");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*gen_cmd) return run_gen(gen);
    if (*attn_cmd) return run_attn(attn);
    if (*mask_cmd) return run_mask(mask);
    if (*sparsity_cmd) return run_sparsity(sparsity);
    if (*sweep_cmd) return run_sweep(sweep);
    if (*bench_cmd) return run_bench(bench_args);
    if (*compare_cmd) return run_compare(compare);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "fgattn: %s\n", e.what());
    return kExitUsage;
  }
  return kExitUsage;
}

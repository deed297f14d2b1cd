// Copyright 2026 The fgattn Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "fgattn/io.hpp"
#include "fgattn/masks.hpp"
#include "fgattn/perfmodel.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace fgattn {
namespace {

struct Run {
  int rc = -1;
  std::string out;
};

Run run(const std::string& args) {
  const std::string cmd = std::string(FGATTN_CLI_PATH) + " " + args + " 2>/dev/null";
  Run r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (pipe == nullptr) return r;
  char buf[4096];
  std::size_t n = 0;
  while ((n = std::fread(buf, 1, sizeof(buf), pipe)) > 0) r.out.append(buf, n);
  const int status = pclose(pipe);
  r.rc = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("fgattn_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
    ASSERT_EQ(run("gen --b 1 --h 2 --n 128 --d 16 --seed 11 --out " + p("in")).rc, 0);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string p(const std::string& name) const { return (dir_ / name).string(); }
  std::string qkv() const { return "--qkv " + p("in") + " --m 32"; }

  fs::path dir_;
};

TEST_F(Cli, GenIsDeterministic) {
  ASSERT_EQ(run("gen --b 1 --h 2 --n 128 --d 16 --seed 11 --out " + p("again")).rc, 0);
  for (const char* f : {"q.fgt", "k.fgt", "v.fgt"})
    EXPECT_EQ(io::read_file(p("in/") + f), io::read_file(p("again/") + f)) << f;
  ASSERT_EQ(run("gen --b 1 --h 2 --n 128 --d 16 --seed 12 --out " + p("other")).rc, 0);
  EXPECT_NE(io::read_file(p("in/q.fgt")), io::read_file(p("other/q.fgt")));
}

TEST_F(Cli, GenRejectsInvalidDims) { EXPECT_EQ(run("gen --n 0 --out " + p("bad")).rc, 2); }

TEST_F(Cli, DenseAndFlashAgree) {
  ASSERT_EQ(run("attn " + qkv() + " --mode dense --out " + p("d.fgt")).rc, 0);
  ASSERT_EQ(run("attn " + qkv() + " --mode flash --out " + p("f.fgt") + " --trace " + p("t.json")).rc, 0);
  const auto r = run("compare --a " + p("d.fgt") + " --b " + p("f.fgt") + " --tol 1e-4");
  EXPECT_EQ(r.rc, 0);
  EXPECT_LE(json::parse(r.out)["max_abs"].get<double>(), 1e-4);
  std::ifstream trace(p("t.json"));
  const auto t = json::parse(trace);
  EXPECT_EQ(t["loads"].get<std::size_t>(), 2u * 4 * 4);
}

TEST_F(Cli, SparseFullMaskMatchesDenseAndIsDeterministic) {
  ASSERT_EQ(run("mask " + qkv() + " --tau 1e-30 --out " + p("full.fgm")).rc, 0);
  EXPECT_DOUBLE_EQ(mask_density(io::read_mask(p("full.fgm"))), 1.0);
  ASSERT_EQ(run("attn " + qkv() + " --mode dense --out " + p("d.fgt")).rc, 0);
  ASSERT_EQ(run("attn " + qkv() + " --mode sparse --mask " + p("full.fgm") + " --out " + p("s1.fgt")).rc, 0);
  ASSERT_EQ(run("attn " + qkv() + " --mode sparse --mask " + p("full.fgm") + " --out " + p("s2.fgt")).rc, 0);
  EXPECT_EQ(run("compare --a " + p("d.fgt") + " --b " + p("s1.fgt") + " --tol 1e-4").rc, 0);
  EXPECT_EQ(io::read_file(p("s1.fgt")), io::read_file(p("s2.fgt")));
}

TEST_F(Cli, SparseWithoutMaskIsUsageError) {
  EXPECT_EQ(run("attn " + qkv() + " --mode sparse --out " + p("s.fgt")).rc, 2);
  EXPECT_EQ(run("attn " + qkv() + " --mode nope").rc, 2);
  EXPECT_EQ(run("attn --mode dense").rc, 2);
}

TEST_F(Cli, MaskReportsDensityAndAcceptsPerNThreshold) {
  const auto a = run("mask " + qkv() + " --scale 1 --tau 0.5/N --out " + p("a.fgm"));
  ASSERT_EQ(a.rc, 0);
  const auto ja = json::parse(a.out);
  EXPECT_DOUBLE_EQ(ja["tau"].get<double>(), 0.5 / 128);
  EXPECT_DOUBLE_EQ(ja["density"].get<double>(), mask_density(io::read_mask(p("a.fgm"))));

  const auto b = run("mask " + qkv() + " --strategy avgq-topk --topk 8 --out " + p("b.fgm"));
  ASSERT_EQ(b.rc, 0);
  EXPECT_DOUBLE_EQ(json::parse(b.out)["density"].get<double>(), 8.0 / 128);
  EXPECT_EQ(run("mask " + qkv() + " --strategy avgq-topk").rc, 2);
  EXPECT_EQ(run("mask " + qkv() + " --tau 0.5/Q").rc, 2);
}

TEST_F(Cli, SparsityOnBlockDiagonalMap) {
  const std::size_t n = 128;
  std::vector<float> data(n * n, 0.0f);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i / 64 == j / 64) data[i * n + j] = 1.0f / 64;
  io::write_map(p("bd.fgm"), AttnMap(1, 1, n, data));
  const auto r = run("sparsity --map " + p("bd.fgm") + " --m 16");
  ASSERT_EQ(r.rc, 0);
  EXPECT_EQ(r.out,
            "Block size,Sparsity\n16x16,50.0000%\n32x32,50.0000%\n64x64,50.0000%\n128x128,0.0000%\n"
            "16x1,50.0000%\n");
}

TEST_F(Cli, SparsityOnUniformMapIsZero) {
  io::write_map(p("u.fgm"), AttnMap(1, 1, 64, std::vector<float>(64 * 64, 1.0f / 64)));
  const auto r = run("sparsity --map " + p("u.fgm") + " --blocks 16,32,64 --m 16");
  ASSERT_EQ(r.rc, 0);
  EXPECT_EQ(r.out, "Block size,Sparsity\n16x16,0.0000%\n32x32,0.0000%\n64x64,0.0000%\n16x1,0.0000%\n");
}

TEST_F(Cli, SweepEndpointsMatchMaskAndBench) {
  const auto sweep = run("sweep " + qkv() + " --scale 1 --steps 2");
  ASSERT_EQ(sweep.rc, 0);
  std::istringstream lines(sweep.out);
  std::string header, first, last;
  std::getline(lines, header);
  std::getline(lines, first);
  std::getline(lines, last);
  EXPECT_EQ(header, "tau,tau_times_n,density,modeled_cycles,projected_speedup,max_abs_error");

  for (const auto& [tau, row] : {std::pair{std::string("0.1/N"), first}, std::pair{std::string("1/N"), last}}) {
    ASSERT_EQ(run("mask " + qkv() + " --scale 1 --tau " + tau + " --out " + p("m.fgm")).rc, 0);
    const auto bench = run("bench --mask " + p("m.fgm") + " --d 16");
    ASSERT_EQ(bench.rc, 0);
    const auto report = json::parse(bench.out);
    std::vector<std::string> cols;
    std::istringstream fields(row);
    for (std::string c; std::getline(fields, c, ',');) cols.push_back(c);
    ASSERT_EQ(cols.size(), 6u);
    EXPECT_NEAR(std::stod(cols[2]), report["density"].get<double>(), 1e-9) << tau;
    EXPECT_EQ(std::stoull(cols[3]), report["modeled_cycles"].get<std::uint64_t>()) << tau;
  }
  EXPECT_GE(std::stod(first.substr(first.find(',', first.find(',') + 1) + 1)),
            std::stod(last.substr(last.find(',', last.find(',') + 1) + 1)));
}

TEST_F(Cli, BenchUsesProfileFile) {
  ASSERT_EQ(run("mask " + qkv() + " --tau 1e-30 --out " + p("full.fgm")).rc, 0);
  std::ofstream(p("free.conf")) << "# no address generation\naddrgen_cycles = 0\n";
  const auto r = run("bench --mask " + p("full.fgm") + " --d 16 --params " + p("free.conf"));
  ASSERT_EQ(r.rc, 0);
  const auto j = json::parse(r.out);
  EXPECT_DOUBLE_EQ(j["projected_speedup"].get<double>(), 1.0);
  EXPECT_EQ(j["bytes_mask"].get<std::uint64_t>(), 4u * 2 * 4 * 128);
  std::ofstream(p("bad.conf")) << "warp_count = 3\n";
  EXPECT_EQ(run("bench --mask " + p("full.fgm") + " --params " + p("bad.conf")).rc, 2);
}

TEST_F(Cli, CompareSelfPerturbedAndCorrupt) {
  const auto self = run("compare --a " + p("in/q.fgt") + " --b " + p("in/q.fgt"));
  EXPECT_EQ(self.rc, 0);
  EXPECT_EQ(json::parse(self.out)["max_abs"].get<double>(), 0.0);

  auto t = io::read_tensor(p("in/q.fgt"));
  std::vector<float> data(t.data().begin(), t.data().end());
  data[17] += 0.01f;
  io::write_tensor(p("pert.fgt"), AttnTensor(t.dims(), data));
  EXPECT_EQ(run("compare --a " + p("in/q.fgt") + " --b " + p("pert.fgt")).rc, 1);

  auto bytes = io::read_file(p("in/q.fgt"));
  bytes.pop_back();
  io::write_file(p("trunc.fgt"), bytes);
  EXPECT_EQ(run("compare --a " + p("in/q.fgt") + " --b " + p("trunc.fgt")).rc, 2);
  EXPECT_EQ(run("compare --a " + p("in/q.fgt") + " --b " + p("in/missing.fgt")).rc, 2);
}

}  // namespace
}  // namespace fgattn

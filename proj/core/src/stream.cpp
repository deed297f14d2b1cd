// Copyright 2026 The fgattn Authors
// SPDX-License-Identifier: Apache-2.0

#include "fgattn/stream.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>

#include "fgattn/fg_sparse.hpp"
#include "fgattn/oracle.hpp"
#include "fgattn/random.hpp"

namespace fgattn {
namespace {

// Stream ids: 0..2 are the initial Q, K, V; iteration t >= 1 draws its
// innovations from 3t .. 3t+2.
AttnTensor drift(const AttnTensor& prev, const AttnConfig& cfg, double rho, std::uint64_t seed,
                 std::uint64_t stream_id) {
  const double keep = rho;
  const double fresh = std::sqrt(std::max(0.0, 1.0 - rho * rho));
  GaussianStream rng(seed, stream_id);
  const auto src = prev.data();
  std::vector<float> next(src.size());
  for (std::size_t i = 0; i < src.size(); ++i) {
    next[i] = static_cast<float>(keep * src[i] + fresh * rng.next());
  }
  return AttnTensor::from_data(cfg, std::move(next));
}

double max_abs_diff(const AttnTensor& a, const AttnTensor& b) {
  double worst = 0.0;
  const auto x = a.data();
  const auto y = b.data();
  for (std::size_t i = 0; i < x.size(); ++i) {
    worst = std::max(worst, std::abs(static_cast<double>(x[i]) - static_cast<double>(y[i])));
  }
  return worst;
}

}  // namespace

void IterStreamConfig::validate() const {
  cfg.validate();
  if (iterations == 0) throw std::invalid_argument("stream needs at least one iteration");
  if (!(rho >= 0.0 && rho <= 1.0)) throw std::invalid_argument("rho must be in [0, 1]");
}

std::vector<Snapshot> generate_stream(const IterStreamConfig& sc) {
  sc.validate();
  std::vector<Snapshot> out;
  out.reserve(sc.iterations);
  out.push_back({AttnTensor::gaussian(sc.cfg, sc.seed, 0), AttnTensor::gaussian(sc.cfg, sc.seed, 1),
                 AttnTensor::gaussian(sc.cfg, sc.seed, 2)});
  for (std::size_t t = 1; t < sc.iterations; ++t) {
    const Snapshot& prev = out.back();
    const std::uint64_t base = 3 * t;
    Snapshot next{drift(prev.q, sc.cfg, sc.rho, sc.seed, base),
                  drift(prev.k, sc.cfg, sc.rho, sc.seed, base + 1),
                  drift(prev.v, sc.cfg, sc.rho, sc.seed, base + 2)};
    out.push_back(std::move(next));
  }
  return out;
}

std::vector<IterationReport> run_cached_pipeline(const std::vector<Snapshot>& stream,
                                                 const MaskBuilderConfig& builder,
                                                 const AttnConfig& cfg) {
  if (stream.empty()) throw std::invalid_argument("cached pipeline needs a nonempty stream");
  builder.validate(cfg.seq_len);

  std::optional<CachedMaskState> cache;
  std::vector<IterationReport> reports;
  reports.reserve(stream.size());
  for (std::size_t it = 0; it < stream.size(); ++it) {
    const Snapshot& snap = stream[it];
    const SparseIndexMask fresh = build_mask(snap.q, snap.k, cfg, builder);

    IterationReport report;
    report.iteration = it;
    if (!cache || refresh_policy(*cache, it)) {
      cache = CachedMaskState{fresh, it, builder.refresh_interval};
      report.refreshed = true;
    }

    const AttnTensor dense = dense_attention(snap.q, snap.k, snap.v, cfg);
    report.output = fg_sparse_attention(snap.q, snap.k, snap.v, cache->mask, cfg);
    const AttnTensor fresh_out = fg_sparse_attention(snap.q, snap.k, snap.v, fresh, cfg);

    report.density = mask_density(cache->mask);
    report.fresh_density = mask_density(fresh);
    report.jaccard = jaccard(cache->mask, fresh);
    report.max_abs_error = max_abs_diff(report.output, dense);
    report.fresh_max_abs_error = max_abs_diff(fresh_out, dense);
    report.matches_fresh = report.output == fresh_out;
    reports.push_back(std::move(report));
  }
  return reports;
}

}  // namespace fgattn

// Copyright 2026 The fgattn Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace fgattn {

enum class EventKind : std::uint8_t {
  kTileLoad,     // contiguous key/value tile (dense kernels)
  kGather,       // indirect key/value gather from a sparse index list
  kTileCompute,  // scores + online softmax + P*V on the tile just loaded
};

struct TraceEvent {
  EventKind kind;
  std::uint32_t batch;
  std::uint32_t head;
  std::uint32_t group;
  std::uint32_t query_rows;
  std::uint32_t key_rows;

  bool operator==(const TraceEvent&) const = default;
};

// Ordered record of what a kernel loaded and computed. Every load event is
// immediately followed by the compute event that consumes it.
struct ExecutionTrace {
  std::size_t head_dim = 0;
  std::vector<TraceEvent> events;
  // Largest number of scratch floats live at once for one query group.
  std::size_t peak_scratch_floats = 0;

  std::size_t count(EventKind kind) const;
  bool operator==(const ExecutionTrace&) const = default;
};

}  // namespace fgattn

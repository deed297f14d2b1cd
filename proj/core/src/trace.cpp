// Copyright 2026 The fgattn Authors
// SPDX-License-Identifier: Apache-2.0

#include "fgattn/trace.hpp"

#include <algorithm>

namespace fgattn {

std::size_t ExecutionTrace::count(EventKind kind) const {
  return static_cast<std::size_t>(
      std::count_if(events.begin(), events.end(), [kind](const TraceEvent& e) { return e.kind == kind; }));
}

}  // namespace fgattn

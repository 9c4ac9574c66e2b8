#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace lpigrad {

struct InvariantResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Fast self-checks of the interpolation, the oracles and the schedules on
/// small seeded instances. Used by `lpigrad_bench check`.
std::vector<InvariantResult> run_invariants(std::uint64_t seed = 42);

}  // namespace lpigrad

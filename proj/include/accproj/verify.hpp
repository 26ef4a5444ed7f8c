#pragma once

// Self-check suite for the projection kernels. Builds seeded systems with a
// known solution and checks the identities every accumulated-projection step
// must satisfy.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "accproj/partition.hpp"
#include "accproj/projection.hpp"

namespace accproj {

using StepFn = std::function<ProjectionState(const ProjectionState&, const BlockPartition&, std::size_t)>;

struct VerifyOptions {
  std::uint64_t seed = 1;
  /// Orders of the random square systems.
  std::vector<std::size_t> sizes{10, 30, 60};
  std::size_t systems_per_size = 10;
  std::size_t sweeps_per_system = 20;
  /// Also run tridiag(-1, 2, -1) of order 100 with block size 20.
  bool include_tridiag = true;
  std::size_t tridiag_sweeps = 400;
  /// Random (b1, b2, alpha) draws and grid points for the two-vector check.
  std::size_t two_vector_draws = 1000;
  std::size_t two_vector_grid = 100000;
  /// Step under test; the suite swaps in a faulty one to check its own
  /// sensitivity.
  StepFn step = ap_step_fast;
};

struct CheckResult {
  std::string name;
  bool passed = true;
  std::size_t events = 0;
  double worst = 0.0;  // largest scaled defect seen
  double limit = 0.0;
  std::string counterexample;  // first failing event, empty when passed
};

struct VerifyReport {
  std::vector<CheckResult> checks;
  std::size_t step_events = 0;

  bool all_passed() const;
};

VerifyReport run_verify(const VerifyOptions& options);

}  // namespace accproj

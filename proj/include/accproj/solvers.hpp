#pragma once

// Stationary accumulated projection solvers. Each outer iteration ("sweep")
// runs one accumulated-projection pass over every row block, always on the
// original system, starting from the previous iterate. MSAP1 and MSAP2 add an
// extra projection after each sweep onto a small subspace spanned by recent
// iterates.

#include <cstddef>

#include "accproj/linalg.hpp"
#include "accproj/projection.hpp"
#include "accproj/report.hpp"

namespace accproj {

/// Which pair of iterates the MSAP1 acceleration combines.
enum class Msap1Variant {
  /// After the sweep producing x_{s+1}, project onto span{x_{s+1}, x_s}.
  after_sweep,
  /// Before sweeping from x_s, project onto span{x_s, x_{s-1}} (sweep outputs).
  before_sweep,
};

/// What MSAP2 keeps of its window H when H is found ill-conditioned.
enum class WindowReset {
  keep_oldest,  // drop all but the first row
  keep_newest,  // drop all but the last row
};

struct SolverConfig {
  std::size_t block_size = 20;
  double overlap_fraction = 0.5;
  double tol = 1e-5;
  std::size_t max_sweeps = 100000;
  std::size_t window = 5;
  double cond_threshold = 1e8;
  Kernel kernel = Kernel::fast;
  Msap1Variant msap1_variant = Msap1Variant::after_sweep;
  WindowReset window_reset = WindowReset::keep_oldest;

  void validate() const;
};

/// Cosine above which two iterates are treated as parallel and the
/// acceleration step is skipped.
inline constexpr double kParallelCosine = 1.0 - 1e-13;

/// Throws NotConverged (carrying the report) when max_sweeps is exhausted.
SolveReport solve_sap(const Matrix& a, const Vector& b, const SolverConfig& config);
SolveReport solve_msap1(const Matrix& a, const Vector& b, const SolverConfig& config);
SolveReport solve_msap2(const Matrix& a, const Vector& b, const SolverConfig& config);

}  // namespace accproj

#pragma once

// Reference solvers for comparison runs. They report through the same
// SolveReport and residual definition as the projection solvers.

#include <cstddef>
#include <optional>

#include "accproj/linalg.hpp"
#include "accproj/report.hpp"

namespace accproj {

struct GmresConfig {
  std::size_t restart = 20;
  double tol = 1e-5;
  std::size_t max_outer = 2000;
  std::optional<Vector> x0;  // zero when absent

  void validate() const;
};

/// Restarted GMRES(m) with Householder Arnoldi. report.sweeps counts restart
/// cycles (the final partial cycle included) and report.inner the steps taken
/// in the final cycle, i.e. the (outer, inner) pair.
SolveReport solve_gmres(const Matrix& a, const Vector& b, const GmresConfig& config);

struct JacobiConfig {
  std::size_t block_size = 20;
  double tol = 1e-5;
  std::size_t max_iters = 100000;

  void validate() const;
};

/// x_{k+1} = x_k + D_B^{-1} (b - A x_k), D_B the block diagonal of A over
/// disjoint contiguous blocks (the last one may be shorter), x_0 = 0.
/// Throws SingularBlock, Diverged (residual above 1e12 times the initial), or
/// NotConverged.
SolveReport solve_block_jacobi(const Matrix& a, const Vector& b, const JacobiConfig& config);

/// Partial-pivoted Gaussian elimination. Throws Singular.
Vector solve_direct(const Matrix& a, const Vector& b);

}  // namespace accproj

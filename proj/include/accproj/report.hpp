#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "accproj/errors.hpp"
#include "accproj/linalg.hpp"

namespace accproj {

/// b - A x
Vector residual_vector(const Matrix& a, const Vector& b, const Vector& x);
/// |b - A x| / |b|; the stopping quantity of every solver and baseline.
double relative_residual(const Matrix& a, const Vector& b, const Vector& x);

struct InvariantViolation {
  std::size_t sweep = 0;
  std::string check;
  double value = 0.0;
  double limit = 0.0;
};

/// How often each MSAP acceleration branch was taken.
struct AccelerationStats {
  std::size_t window = 0;           // projection onto the whole window H
  std::size_t ill_conditioned = 0;  // H too ill-conditioned, two-vector fallback
  std::size_t two_vector = 0;       // H not full yet, two-vector step
  std::size_t skipped = 0;          // iterates numerically parallel, sweep output kept
};

struct SolveReport {
  std::string solver;
  Vector solution;
  double c = 0.0;  // x'solution as maintained by the projection methods
  bool converged = false;
  /// Outer iterations: sweeps for SAP/MSAP, restart cycles for GMRES,
  /// iterations for block Jacobi.
  std::size_t sweeps = 0;
  std::size_t block_steps = 0;
  /// GMRES only: inner steps taken in the final cycle.
  std::size_t inner = 0;
  /// Relative residual per outer iteration, starting with the initial guess.
  /// GMRES records the true residual at each cycle start followed by the
  /// least-squares estimate after every inner step.
  std::vector<double> residual_history;
  std::vector<double> pnorm_history;
  std::vector<InvariantViolation> invariant_log;
  AccelerationStats acceleration;
  double wall_seconds = 0.0;
};

/// Raised when the iteration budget runs out; carries the partial report.
class NotConverged : public Error {
 public:
  explicit NotConverged(SolveReport report);
  const SolveReport& report() const noexcept { return report_; }

 private:
  SolveReport report_;
};

}  // namespace accproj

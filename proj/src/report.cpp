#include "accproj/report.hpp"

namespace accproj {

Vector residual_vector(const Matrix& a, const Vector& b, const Vector& x) {
  Vector r = b;
  r -= multiply(a, x);
  return r;
}

double relative_residual(const Matrix& a, const Vector& b, const Vector& x) {
  const double bn = norm2(b);
  const double rn = norm2(residual_vector(a, b, x));
  return bn > 0.0 ? rn / bn : rn;
}

NotConverged::NotConverged(SolveReport report)
    : Error(report.solver + " did not converge in " + std::to_string(report.sweeps) +
            " iterations (residual " +
            std::to_string(report.residual_history.empty() ? 0.0 : report.residual_history.back()) + ")"),
      report_(std::move(report)) {}

}  // namespace accproj

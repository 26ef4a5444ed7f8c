#include "accproj/projection.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "accproj/errors.hpp"

namespace accproj {

double bookkeeping_defect(const ProjectionState& state) {
  const double pp = dot(state.p, state.p);
  return std::fabs(state.c - pp) / std::max(1.0, pp);
}

ProjectionState init_state(const Matrix& a, const Vector& b) {
  if (b.size() != a.rows()) throw InvalidArgument("init_state: rhs length mismatch");
  Vector atb = multiply_transposed(a, b);
  const double atb_norm = norm2(atb);
  if (!(atb_norm >= 1e-300)) throw OrthogonalRhs("A'b vanishes; cannot form a starting projection");
  const double bb = dot(b, b);
  const double alpha = bb / (atb_norm * atb_norm);
  return {alpha * std::move(atb), alpha * bb};
}

TwoVectorResult optimal_two_vector(double b1, double b2, double alpha) {
  const double denom = b1 - alpha * b2;
  const double scale = std::max(std::fabs(b1), std::fabs(b2));
  if (!(std::fabs(alpha) < 1.0 - 1e-14)) {
    throw DegenerateDirection("directions are (anti)parallel: |alpha| >= 1");
  }
  if (!(std::fabs(denom) >= 1e-14 * scale) || scale == 0.0) {
    throw DegenerateDirection("b1 - alpha*b2 vanishes; the optimum lies at infinity");
  }
  TwoVectorResult out;
  out.s = (b2 - alpha * b1) / denom;
  // |b1| sqrt(1 + (r - alpha)^2 / (1 - alpha^2)) with r = b2/b1, written so it
  // also holds for b1 = 0.
  const double lift = b2 - alpha * b1;
  out.fs = std::sqrt(b1 * b1 + lift * lift / (1.0 - alpha * alpha));
  return out;
}

ProjectionState ap_step_fast(const ProjectionState& state, const BlockPartition& partition,
                             std::size_t block) {
  const Block& blk = partition[block];
  const Vector qp = multiply_transposed(blk.q, state.p);
  Vector p_out = multiply(blk.q, blk.rhs_t);  // projection of x onto ran(A_i')
  const double bt_bt = dot(blk.rhs_t, blk.rhs_t);

  Vector p_bar = state.p - multiply(blk.q, qp);
  const double bar_sq = dot(p_bar, p_bar);
  if (!(std::sqrt(bar_sq) > kDegenerateDirection * norm2(state.p))) {
    return {std::move(p_out), bt_bt};
  }
  const double gap = state.c - dot(blk.rhs_t, qp);  // x'p_bar
  const double beta = gap / bar_sq;
  axpy(beta, p_bar.span(), p_out.span());
  return {std::move(p_out), bt_bt + beta * gap};
}

ProjectionState ap_step_naive(const ProjectionState& state, const BlockPartition& partition,
                              std::size_t block) {
  const Block& blk = partition[block];
  const std::size_t n = state.p.size();
  const std::size_t m = blk.rows.size();
  Matrix w(n, m + 1);
  Vector l(m + 1);
  l[0] = state.c;
  for (std::size_t i = 0; i < n; ++i) w(i, 0) = state.p[i];
  for (std::size_t j = 0; j < m; ++j) {
    l[j + 1] = blk.rhs[j];
    for (std::size_t i = 0; i < n; ++i) w(i, j + 1) = blk.a_rows(j, i);
  }
  const Vector y = solve_gram(w, l);
  return {multiply(w, y), dot(l, y)};
}

ProjectionState ap_sweep(ProjectionState state, const BlockPartition& partition, Kernel kernel,
                         const StepObserver& observer) {
  for (std::size_t i = 0; i < partition.size(); ++i) {
    ProjectionState next;
    if (kernel == Kernel::fast) {
      next = ap_step_fast(state, partition, i);
    } else {
      try {
        next = ap_step_naive(state, partition, i);
      } catch (const RankDeficient&) {
        const Block& blk = partition[i];
        next = {multiply(blk.q, blk.rhs_t), dot(blk.rhs_t, blk.rhs_t)};
      }
    }
    if (observer) observer(i, state, next);
    state = std::move(next);
  }
  return state;
}

ProjectionState window_project(std::span<const Vector> vectors, std::span<const double> inner_products) {
  if (vectors.empty() || vectors.size() != inner_products.size()) {
    throw InvalidArgument("window_project: need one inner product per vector");
  }
  const QRFactor f = householder_qr(Matrix::from_columns(vectors));
  Vector l(std::vector<double>(inner_products.begin(), inner_products.end()));
  // p = V (V'V)^{-1} L = Q z with R'z = L, and c = L'(V'V)^{-1} L = z'z.
  const Vector z = forward_substitute_transposed(f.r, l);
  return {multiply(f.q, z), dot(z, z)};
}

}  // namespace accproj

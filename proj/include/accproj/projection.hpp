#pragma once

// Accumulated-projection kernels. Every operation threads a ProjectionState
// (p, c): p is the orthogonal projection of the unknown solution x onto some
// known subspace and c = x'p is carried along from system data alone. Since
// x - p is orthogonal to p, c must equal p'p; that identity is the
// library-wide self-check.

#include <cstddef>
#include <functional>
#include <span>

#include "accproj/linalg.hpp"
#include "accproj/partition.hpp"

namespace accproj {

struct ProjectionState {
  Vector p;
  double c = 0.0;
};

/// |c - p'p| measured against max(1, p'p).
double bookkeeping_defect(const ProjectionState& state);

/// p0 = alpha A'b, c0 = alpha |b|^2 with alpha = |b|^2 / |A'b|^2.
/// Throws OrthogonalRhs when |A'b| < 1e-300.
ProjectionState init_state(const Matrix& a, const Vector& b);

struct TwoVectorResult {
  double s = 0.0;   // optimal coefficient of v2 in v1 + s v2
  double fs = 0.0;  // |x'(v1 + s v2)| / |v1 + s v2|
};

/// Best combination v1 + t v2 of two unit vectors with x'v1 = b1,
/// x'v2 = b2 and v1'v2 = alpha. Throws DegenerateDirection when
/// |b1 - alpha b2| < 1e-14 max(|b1|, |b2|) or |alpha| >= 1 - 1e-14.
TwoVectorResult optimal_two_vector(double b1, double b2, double alpha);

/// Relative threshold on |p - Q Q'p| / |p| below which p is treated as lying
/// inside the block's row space.
inline constexpr double kDegenerateDirection = 1e-12;

/// One projection step onto span{p, rows of block i}, using the cached
/// orthonormal factor of the block.
ProjectionState ap_step_fast(const ProjectionState& state, const BlockPartition& partition,
                             std::size_t block);

/// The same step computed from W = [p, A_i'] and the Gram system
/// (W'W) y = [c; b_i]. Throws RankDeficient when p lies in ran(A_i').
ProjectionState ap_step_naive(const ProjectionState& state, const BlockPartition& partition,
                              std::size_t block);

enum class Kernel { naive, fast };

using StepObserver =
    std::function<void(std::size_t block, const ProjectionState& before, const ProjectionState& after)>;

/// One pass over all blocks in order. The naive kernel falls back to the
/// in-range branch of the fast kernel when W_i is rank deficient.
ProjectionState ap_sweep(ProjectionState state, const BlockPartition& partition,
                         Kernel kernel = Kernel::fast, const StepObserver& observer = {});

/// Projection of x onto span(vectors), given inner_products[j] = x'vectors[j].
/// Throws RankDeficient when the vectors are numerically dependent.
ProjectionState window_project(std::span<const Vector> vectors, std::span<const double> inner_products);

}  // namespace accproj

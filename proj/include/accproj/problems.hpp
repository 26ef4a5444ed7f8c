#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>

#include "accproj/linalg.hpp"

namespace accproj {

struct LinearProblem {
  std::string name;
  Matrix a;
  Vector b;
  /// Exact algebraic solution, |A x_exact - b| <= 1e-10 |b| when present.
  std::optional<Vector> x_exact;
  /// For discretized problems: the continuous solution sampled at the nodes.
  std::optional<Vector> nodal_exact;
};

/// tridiag(-1, 2, -1) of order n with b = A x_exact (x_exact = ones when not
/// given).
LinearProblem gen_tridiag(std::size_t n, std::optional<Vector> x_exact = std::nullopt);

using ScalarFn = std::function<double(double)>;

/// Two-point problem (a(t) u')' + b(t) u = f(t) on (0, 1), u(0) = u(1) = 0,
/// discretized on n interior nodes.
struct BvpSpec {
  std::size_t n = 200;
  ScalarFn a_coeff;
  ScalarFn b_coeff;
  ScalarFn forcing;
  ScalarFn exact_u;  // optional
};

/// a(t) = 1 + t, b(t) = t, u(t) = t (1 - t) e^{2 + t}, with f derived from u.
BvpSpec reference_bvp(std::size_t n);

/// Piecewise-linear Galerkin assembly of the weak form
/// -int a u'v' + int b u v = int f v on a uniform grid with n + 1 elements,
/// 3-point Gauss quadrature per element. x_exact is the discrete solution and
/// nodal_exact the interpolant of exact_u (when supplied).
LinearProblem assemble_fem_bvp(const BvpSpec& spec);

/// Seeded full-row-rank matrix (rows <= cols) with uniform(-1, 1) entries,
/// random x_exact and b = A x_exact.
LinearProblem gen_random_consistent(std::size_t rows, std::size_t cols, std::uint64_t seed);

/// Seeded square matrix 2 I + R / sqrt(n), R uniform(-1, 1); condition number
/// stays small.
LinearProblem gen_random_well_conditioned(std::size_t n, std::uint64_t seed);

/// Builds a problem from an id: "tridiag:n=N", "fem:n=N",
/// "random:rows=R,cols=C" (uses seed). Throws InvalidArgument.
LinearProblem make_problem(std::string_view id, std::uint64_t seed = 1);

/// Reads a real Matrix Market matrix (coordinate or array; general,
/// symmetric or skew-symmetric).
Matrix read_matrix_market_matrix(const std::filesystem::path& path);

/// Reads a matrix and its right-hand side. b comes from "<stem>_b.mtx" next
/// to the file when present, otherwise b = A * ones and x_exact = ones.
LinearProblem read_matrix_market(const std::filesystem::path& path);

/// Writes coordinate/real/general with shortest round-trip number formatting.
void write_matrix_market(const std::filesystem::path& path, const Matrix& a);
/// Writes a column vector as an n x 1 array file.
void write_matrix_market(const std::filesystem::path& path, const Vector& v);

/// The companion right-hand-side path for a matrix file.
std::filesystem::path rhs_companion(const std::filesystem::path& matrix_path);

}  // namespace accproj

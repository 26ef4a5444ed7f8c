#pragma once

// Dense kernels shared by every solver: row-major matrices, Householder QR,
// triangular/Gram solves, LU, and exact small-matrix condition numbers.

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace accproj {

class Vector {
 public:
  Vector() = default;
  explicit Vector(std::size_t n, double fill = 0.0) : v_(n, fill) {}
  Vector(std::initializer_list<double> init) : v_(init) {}
  explicit Vector(std::vector<double> values) : v_(std::move(values)) {}

  std::size_t size() const noexcept { return v_.size(); }
  bool empty() const noexcept { return v_.empty(); }

  double& operator[](std::size_t i) { return v_[i]; }
  double operator[](std::size_t i) const { return v_[i]; }

  double* data() noexcept { return v_.data(); }
  const double* data() const noexcept { return v_.data(); }
  std::span<double> span() noexcept { return v_; }
  std::span<const double> span() const noexcept { return v_; }

  auto begin() noexcept { return v_.begin(); }
  auto end() noexcept { return v_.end(); }
  auto begin() const noexcept { return v_.begin(); }
  auto end() const noexcept { return v_.end(); }

  const std::vector<double>& values() const noexcept { return v_; }

  Vector& operator+=(const Vector& o);
  Vector& operator-=(const Vector& o);
  Vector& operator*=(double s);

  friend bool operator==(const Vector&, const Vector&) = default;

 private:
  std::vector<double> v_;
};

Vector operator+(Vector a, const Vector& b);
Vector operator-(Vector a, const Vector& b);
Vector operator*(double s, Vector v);

double dot(std::span<const double> a, std::span<const double> b);
inline double dot(const Vector& a, const Vector& b) { return dot(a.span(), b.span()); }
double norm2(std::span<const double> a);
inline double norm2(const Vector& a) { return norm2(a.span()); }
double norm_inf(const Vector& a);
/// y += s * x
void axpy(double s, std::span<const double> x, std::span<double> y);
bool all_finite(const Vector& v);

/// Row-major dense matrix.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), a_(rows * cols, fill) {}
  Matrix(std::initializer_list<std::initializer_list<double>> rows);

  static Matrix identity(std::size_t n);
  /// Builds a matrix whose columns are the given vectors.
  static Matrix from_columns(std::span<const Vector> columns);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  double& operator()(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }

  std::span<double> row(std::size_t i) { return {a_.data() + i * cols_, cols_}; }
  std::span<const double> row(std::size_t i) const { return {a_.data() + i * cols_, cols_}; }

  const double* data() const noexcept { return a_.data(); }

  Matrix transpose() const;
  double max_abs() const;

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> a_;
};

/// A * x
Vector multiply(const Matrix& a, const Vector& x);
/// A' * x
Vector multiply_transposed(const Matrix& a, const Vector& x);
Matrix multiply(const Matrix& a, const Matrix& b);

struct QRFactor {
  Matrix q;  // rows x cols, orthonormal columns
  Matrix r;  // cols x cols, upper triangular, nonnegative diagonal
};

/// Thin Householder QR of a tall matrix. Throws RankDeficient when some
/// |r_jj| < 1e-13 * max|tall|.
QRFactor householder_qr(const Matrix& tall);

/// Solves R y = rhs for upper-triangular R.
Vector back_substitute(const Matrix& r, const Vector& rhs);
/// Solves R' y = rhs for upper-triangular R.
Vector forward_substitute_transposed(const Matrix& r, const Vector& rhs);

/// Returns y with (W'W) y = rhs. W'W is never formed; the solve goes through
/// the QR factor of W.
Vector solve_gram(const Matrix& w, const Vector& rhs);

/// 2-norm condition number of mat' (equivalently of mat) from its singular
/// values, computed by one-sided Jacobi rotations on the rows. Intended for
/// short windows (rows <= 64). Returns +inf for rank-deficient input.
double condition_estimate(const Matrix& mat);

/// Partial-pivoted LU of a square matrix.
class LuFactor {
 public:
  /// Throws Singular on a zero (or negligible) pivot.
  explicit LuFactor(const Matrix& a);
  Vector solve(const Vector& rhs) const;
  std::size_t size() const noexcept { return lu_.rows(); }

 private:
  Matrix lu_;
  std::vector<std::size_t> perm_;
};

}  // namespace accproj

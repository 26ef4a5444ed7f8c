#include "accproj/linalg.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>

#include "accproj/errors.hpp"

namespace accproj {

Vector& Vector::operator+=(const Vector& o) {
  assert(o.size() == size());
  for (std::size_t i = 0; i < v_.size(); ++i) v_[i] += o.v_[i];
  return *this;
}

Vector& Vector::operator-=(const Vector& o) {
  assert(o.size() == size());
  for (std::size_t i = 0; i < v_.size(); ++i) v_[i] -= o.v_[i];
  return *this;
}

Vector& Vector::operator*=(double s) {
  for (double& x : v_) x *= s;
  return *this;
}

Vector operator+(Vector a, const Vector& b) { return a += b; }
Vector operator-(Vector a, const Vector& b) { return a -= b; }
Vector operator*(double s, Vector v) { return v *= s; }

double dot(std::span<const double> a, std::span<const double> b) {
  assert(a.size() == b.size());
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(std::span<const double> a) {
  // Scaled accumulation; avoids overflow for large entries.
  double scale = 0.0;
  double ssq = 1.0;
  for (double x : a) {
    if (x == 0.0) continue;
    const double ax = std::fabs(x);
    if (scale < ax) {
      ssq = 1.0 + ssq * (scale / ax) * (scale / ax);
      scale = ax;
    } else {
      ssq += (ax / scale) * (ax / scale);
    }
  }
  return scale * std::sqrt(ssq);
}

double norm_inf(const Vector& a) {
  double m = 0.0;
  for (double x : a) m = std::max(m, std::fabs(x));
  return m;
}

void axpy(double s, std::span<const double> x, std::span<double> y) {
  assert(x.size() == y.size());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += s * x[i];
}

bool all_finite(const Vector& v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows)
    : rows_(rows.size()), cols_(rows.size() ? rows.begin()->size() : 0) {
  a_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) throw InvalidArgument("ragged matrix initializer");
    a_.insert(a_.end(), r.begin(), r.end());
  }
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::from_columns(std::span<const Vector> columns) {
  if (columns.empty()) return {};
  const std::size_t n = columns.front().size();
  Matrix m(n, columns.size());
  for (std::size_t j = 0; j < columns.size(); ++j) {
    if (columns[j].size() != n) throw InvalidArgument("column length mismatch");
    for (std::size_t i = 0; i < n; ++i) m(i, j) = columns[j][i];
  }
  return m;
}

Matrix Matrix::transpose() const {
  Matrix t(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

double Matrix::max_abs() const {
  double m = 0.0;
  for (double x : a_) m = std::max(m, std::fabs(x));
  return m;
}

Vector multiply(const Matrix& a, const Vector& x) {
  assert(a.cols() == x.size());
  Vector y(a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) y[i] = dot(a.row(i), x.span());
  return y;
}

Vector multiply_transposed(const Matrix& a, const Vector& x) {
  assert(a.rows() == x.size());
  Vector y(a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) axpy(x[i], a.row(i), y.span());
  return y;
}

Matrix multiply(const Matrix& a, const Matrix& b) {
  assert(a.cols() == b.rows());
  Matrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) axpy(a(i, k), b.row(k), c.row(i));
  return c;
}

QRFactor householder_qr(const Matrix& tall) {
  const std::size_t m = tall.rows();
  const std::size_t n = tall.cols();
  if (m < n) throw InvalidArgument("householder_qr: matrix must have rows >= cols");
  const double drop = 1e-13 * tall.max_abs();

  Matrix w = tall;
  Matrix r(n, n);
  std::vector<std::vector<double>> reflectors(n);

  for (std::size_t j = 0; j < n; ++j) {
    std::vector<double> v(m - j);
    for (std::size_t i = j; i < m; ++i) v[i - j] = w(i, j);
    const double normx = norm2(v);
    const double alpha = v[0] > 0.0 ? -normx : normx;
    v[0] -= alpha;
    const double vnorm = norm2(v);
    if (vnorm > 0.0) {
      for (double& e : v) e /= vnorm;
      for (std::size_t k = j; k < n; ++k) {
        double s = 0.0;
        for (std::size_t i = j; i < m; ++i) s += v[i - j] * w(i, k);
        s *= 2.0;
        for (std::size_t i = j; i < m; ++i) w(i, k) -= s * v[i - j];
      }
    }
    r(j, j) = vnorm > 0.0 ? alpha : w(j, j);
    for (std::size_t k = j + 1; k < n; ++k) r(j, k) = w(j, k);
    reflectors[j] = std::move(v);
  }

  for (std::size_t j = 0; j < n; ++j) {
    if (!(std::fabs(r(j, j)) >= drop) || r(j, j) == 0.0) {
      throw RankDeficient("householder_qr: column " + std::to_string(j) +
                          " is numerically dependent");
    }
  }

  Matrix q(m, n);
  for (std::size_t j = 0; j < n; ++j) q(j, j) = 1.0;
  for (std::size_t jj = n; jj-- > 0;) {
    const auto& v = reflectors[jj];
    for (std::size_t k = 0; k < n; ++k) {
      double s = 0.0;
      for (std::size_t i = jj; i < m; ++i) s += v[i - jj] * q(i, k);
      if (s == 0.0) continue;
      s *= 2.0;
      for (std::size_t i = jj; i < m; ++i) q(i, k) -= s * v[i - jj];
    }
  }

  for (std::size_t j = 0; j < n; ++j) {
    if (r(j, j) < 0.0) {
      for (std::size_t k = j; k < n; ++k) r(j, k) = -r(j, k);
      for (std::size_t i = 0; i < m; ++i) q(i, j) = -q(i, j);
    }
  }
  return {std::move(q), std::move(r)};
}

Vector back_substitute(const Matrix& r, const Vector& rhs) {
  const std::size_t n = r.rows();
  assert(r.cols() == n && rhs.size() == n);
  Vector y = rhs;
  for (std::size_t ii = n; ii-- > 0;) {
    double s = y[ii];
    for (std::size_t k = ii + 1; k < n; ++k) s -= r(ii, k) * y[k];
    y[ii] = s / r(ii, ii);
  }
  return y;
}

Vector forward_substitute_transposed(const Matrix& r, const Vector& rhs) {
  const std::size_t n = r.rows();
  assert(r.cols() == n && rhs.size() == n);
  Vector y = rhs;
  for (std::size_t i = 0; i < n; ++i) {
    double s = y[i];
    for (std::size_t k = 0; k < i; ++k) s -= r(k, i) * y[k];
    y[i] = s / r(i, i);
  }
  return y;
}

Vector solve_gram(const Matrix& w, const Vector& rhs) {
  if (rhs.size() != w.cols()) throw InvalidArgument("solve_gram: rhs length mismatch");
  const QRFactor f = householder_qr(w);
  // W'W = R'R
  return back_substitute(f.r, forward_substitute_transposed(f.r, rhs));
}

double condition_estimate(const Matrix& mat) {
  if (mat.rows() == 0 || mat.cols() == 0 || mat.max_abs() < 1e-300) {
    throw ZeroMatrix("condition_estimate: matrix is zero");
  }
  if (mat.rows() > 64) throw InvalidArgument("condition_estimate: window exceeds 64 rows");

  // Singular values of a k x n matrix with k << n equal those of its row
  // Gram matrix; rotate rows until mutually orthogonal, then read norms.
  Matrix rows = mat;
  const std::size_t k = rows.rows();
  const double eps = std::numeric_limits<double>::epsilon();
  for (int sweep = 0; sweep < 80; ++sweep) {
    bool rotated = false;
    for (std::size_t i = 0; i + 1 < k; ++i) {
      for (std::size_t j = i + 1; j < k; ++j) {
        auto ri = rows.row(i);
        auto rj = rows.row(j);
        const double a = dot(ri, ri);
        const double b = dot(rj, rj);
        const double g = dot(ri, rj);
        if (std::fabs(g) <= eps * std::sqrt(a * b) || g == 0.0) continue;
        rotated = true;
        const double zeta = (b - a) / (2.0 * g);
        const double t = (zeta >= 0.0 ? 1.0 : -1.0) / (std::fabs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        for (std::size_t l = 0; l < ri.size(); ++l) {
          const double x = ri[l];
          const double y = rj[l];
          ri[l] = c * x - s * y;
          rj[l] = s * x + c * y;
        }
      }
    }
    if (!rotated) break;
  }
  double smax = 0.0;
  double smin = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < k; ++i) {
    const double s = norm2(rows.row(i));
    smax = std::max(smax, s);
    smin = std::min(smin, s);
  }
  // A wide matrix has at most cols nonzero singular values.
  if (k > mat.cols() || smin == 0.0) return std::numeric_limits<double>::infinity();
  return smax / smin;
}

LuFactor::LuFactor(const Matrix& a) : lu_(a), perm_(a.rows()) {
  const std::size_t n = a.rows();
  if (a.cols() != n) throw InvalidArgument("LuFactor: matrix must be square");
  const double tiny = static_cast<double>(n) * std::numeric_limits<double>::epsilon() * a.max_abs();
  for (std::size_t i = 0; i < n; ++i) perm_[i] = i;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    for (std::size_t i = k + 1; i < n; ++i)
      if (std::fabs(lu_(i, k)) > std::fabs(lu_(piv, k))) piv = i;
    if (std::fabs(lu_(piv, k)) <= tiny || lu_(piv, k) == 0.0) {
      throw Singular("LuFactor: zero pivot in column " + std::to_string(k));
    }
    if (piv != k) {
      std::swap_ranges(lu_.row(k).begin(), lu_.row(k).end(), lu_.row(piv).begin());
      std::swap(perm_[k], perm_[piv]);
    }
    const double d = lu_(k, k);
    for (std::size_t i = k + 1; i < n; ++i) {
      const double l = lu_(i, k) / d;
      lu_(i, k) = l;
      if (l == 0.0) continue;
      for (std::size_t j = k + 1; j < n; ++j) lu_(i, j) -= l * lu_(k, j);
    }
  }
}

Vector LuFactor::solve(const Vector& rhs) const {
  const std::size_t n = lu_.rows();
  if (rhs.size() != n) throw InvalidArgument("LuFactor::solve: rhs length mismatch");
  Vector y(n);
  for (std::size_t i = 0; i < n; ++i) {
    double s = rhs[perm_[i]];
    for (std::size_t k = 0; k < i; ++k) s -= lu_(i, k) * y[k];
    y[i] = s;
  }
  for (std::size_t ii = n; ii-- > 0;) {
    double s = y[ii];
    for (std::size_t k = ii + 1; k < n; ++k) s -= lu_(ii, k) * y[k];
    y[ii] = s / lu_(ii, ii);
  }
  return y;
}

}  // namespace accproj

#include "accproj/baselines.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <string>
#include <vector>

#include "accproj/errors.hpp"

namespace accproj {

void GmresConfig::validate() const {
  if (restart < 1) throw InvalidArgument("GMRES restart must be at least 1");
  if (!(tol > 0.0)) throw InvalidArgument("tolerance must be positive");
  if (max_outer < 1) throw InvalidArgument("max_outer must be at least 1");
}

void JacobiConfig::validate() const {
  if (block_size < 1) throw InvalidArgument("Jacobi block size must be at least 1");
  if (!(tol > 0.0)) throw InvalidArgument("tolerance must be positive");
  if (max_iters < 1) throw InvalidArgument("max_iters must be at least 1");
}

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void require_square(const Matrix& a, const Vector& b, const char* who) {
  if (a.rows() != a.cols()) throw InvalidArgument(std::string(who) + ": matrix must be square");
  if (b.size() != a.rows()) throw InvalidArgument(std::string(who) + ": rhs length mismatch");
}

/// Householder reflector I - 2 w w' with w nonzero only from index `first`.
struct Reflector {
  std::size_t first = 0;
  std::vector<double> w;  // entries first..n-1, unit norm or all zero

  void apply(Vector& z) const {
    double s = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) s += w[i] * z[first + i];
    if (s == 0.0) return;
    s *= 2.0;
    for (std::size_t i = 0; i < w.size(); ++i) z[first + i] -= s * w[i];
  }
};

}  // namespace

SolveReport solve_gmres(const Matrix& a, const Vector& b, const GmresConfig& config) {
  config.validate();
  require_square(a, b, "solve_gmres");
  const auto t0 = std::chrono::steady_clock::now();
  const std::size_t n = a.rows();
  const std::size_t m = std::min(config.restart, n);
  const double bn = norm2(b);

  SolveReport report;
  report.solver = "gmres";
  Vector x = config.x0.value_or(Vector(n));
  if (x.size() != n) throw InvalidArgument("solve_gmres: x0 length mismatch");

  auto finish = [&](bool converged) {
    report.converged = converged;
    report.solution = std::move(x);
    report.wall_seconds = seconds_since(t0);
    if (!converged) throw NotConverged(std::move(report));
    return std::move(report);
  };

  double res = relative_residual(a, b, x);
  report.residual_history.push_back(res);
  if (res <= config.tol || bn == 0.0) return finish(true);

  std::vector<Reflector> refl(m + 1);
  std::vector<double> hess((m + 1) * m);  // column-major (m+1) x m
  auto h = [&](std::size_t i, std::size_t j) -> double& { return hess[j * (m + 1) + i]; };
  std::vector<double> g(m + 1), cs(m), sn(m);

  for (std::size_t outer = 1; outer <= config.max_outer; ++outer) {
    Vector z = residual_vector(a, b, x);
    std::fill(hess.begin(), hess.end(), 0.0);
    std::size_t steps = 0;

    for (std::size_t k = 0; k <= m; ++k) {
      // Reflector P_k mapping z[k:] onto a multiple of e_k.
      Reflector& pk = refl[k];
      pk.first = k;
      pk.w.assign(z.begin() + static_cast<std::ptrdiff_t>(k), z.end());
      const double sigma = norm2(pk.w);
      const double alpha = z[k] > 0.0 ? -sigma : sigma;
      if (sigma > 0.0) {
        pk.w[0] -= alpha;
        const double wn = norm2(pk.w);
        for (double& e : pk.w) e /= wn;
      } else {
        std::fill(pk.w.begin(), pk.w.end(), 0.0);
      }

      if (k == 0) {
        g.assign(m + 1, 0.0);
        g[0] = alpha;
      } else {
        const std::size_t col = k - 1;
        for (std::size_t i = 0; i < k; ++i) h(i, col) = z[i];
        h(k, col) = alpha;
        for (std::size_t i = 0; i < col; ++i) {
          const double t = cs[i] * h(i, col) + sn[i] * h(i + 1, col);
          h(i + 1, col) = -sn[i] * h(i, col) + cs[i] * h(i + 1, col);
          h(i, col) = t;
        }
        const double ha = h(col, col);
        const double hb = h(col + 1, col);
        if (hb == 0.0) {
          cs[col] = 1.0;
          sn[col] = 0.0;
        } else {
          const double rr = std::hypot(ha, hb);
          cs[col] = ha / rr;
          sn[col] = hb / rr;
        }
        h(col, col) = cs[col] * ha + sn[col] * hb;
        h(col + 1, col) = 0.0;
        g[col + 1] = -sn[col] * g[col];
        g[col] = cs[col] * g[col];
        steps = k;
        const double est = std::fabs(g[col + 1]) / bn;
        report.residual_history.push_back(est);
        if (est <= config.tol || k == m || hb == 0.0) break;
      }

      // v_k = P_0 ... P_k e_k, then z = P_k ... P_0 A v_k.
      Vector v(n);
      v[k] = 1.0;
      for (std::size_t i = k + 1; i-- > 0;) refl[i].apply(v);
      z = multiply(a, v);
      for (std::size_t i = 0; i <= k; ++i) refl[i].apply(z);
    }

    // Upper-triangular solve for the step coefficients, then
    // x += sum_i y_i v_i evaluated from the innermost reflector out.
    std::vector<double> y(steps);
    for (std::size_t ii = steps; ii-- > 0;) {
      double s = g[ii];
      for (std::size_t j = ii + 1; j < steps; ++j) s -= h(ii, j) * y[j];
      y[ii] = s / h(ii, ii);
    }
    Vector u(n);
    for (std::size_t ii = steps; ii-- > 0;) {
      u[ii] += y[ii];
      refl[ii].apply(u);
    }
    x += u;

    report.sweeps = outer;
    report.inner = steps;
    report.block_steps += steps;
    res = relative_residual(a, b, x);
    report.residual_history.push_back(res);
    if (res <= config.tol) return finish(true);
    if (!all_finite(x)) break;
  }
  return finish(false);
}

SolveReport solve_block_jacobi(const Matrix& a, const Vector& b, const JacobiConfig& config) {
  config.validate();
  require_square(a, b, "solve_block_jacobi");
  const auto t0 = std::chrono::steady_clock::now();
  const std::size_t n = a.rows();
  const std::size_t bs = std::min(config.block_size, n);

  struct DiagBlock {
    std::size_t first;
    LuFactor lu;
  };
  std::vector<DiagBlock> blocks;
  for (std::size_t first = 0, i = 0; first < n; first += bs, ++i) {
    const std::size_t len = std::min(bs, n - first);
    Matrix d(len, len);
    for (std::size_t r = 0; r < len; ++r)
      for (std::size_t c = 0; c < len; ++c) d(r, c) = a(first + r, first + c);
    try {
      blocks.push_back({first, LuFactor(d)});
    } catch (const Singular&) {
      throw SingularBlock(i, "diagonal block " + std::to_string(i) + " is singular");
    }
  }

  SolveReport report;
  report.solver = "jacobi";
  Vector x(n);
  const double bn = norm2(b);
  Vector r = residual_vector(a, b, x);
  double res = bn > 0.0 ? norm2(r) / bn : 0.0;
  const double initial = res;
  report.residual_history.push_back(res);

  while (!(res <= config.tol) && report.sweeps < config.max_iters) {
    for (const DiagBlock& blk : blocks) {
      const std::size_t len = blk.lu.size();
      Vector rb(len);
      for (std::size_t i = 0; i < len; ++i) rb[i] = r[blk.first + i];
      const Vector dx = blk.lu.solve(rb);
      for (std::size_t i = 0; i < len; ++i) x[blk.first + i] += dx[i];
    }
    ++report.sweeps;
    report.block_steps += blocks.size();
    r = residual_vector(a, b, x);
    res = norm2(r) / bn;
    report.residual_history.push_back(res);
    if (!(res <= 1e12 * initial)) {
      throw Diverged("block Jacobi diverged after " + std::to_string(report.sweeps) + " iterations");
    }
  }
  report.converged = res <= config.tol;
  report.solution = std::move(x);
  report.wall_seconds = seconds_since(t0);
  if (!report.converged) throw NotConverged(std::move(report));
  return report;
}

Vector solve_direct(const Matrix& a, const Vector& b) {
  require_square(a, b, "solve_direct");
  return LuFactor(a).solve(b);
}

}  // namespace accproj

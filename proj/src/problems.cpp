#include "accproj/problems.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <fstream>
#include <map>
#include <random>
#include <sstream>
#include <vector>

#include "accproj/baselines.hpp"
#include "accproj/errors.hpp"
#include "accproj/text.hpp"

namespace accproj {

LinearProblem gen_tridiag(std::size_t n, std::optional<Vector> x_exact) {
  if (n < 2) throw InvalidArgument("gen_tridiag: n must be at least 2");
  Matrix a(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    a(i, i) = 2.0;
    if (i > 0) a(i, i - 1) = -1.0;
    if (i + 1 < n) a(i, i + 1) = -1.0;
  }
  Vector x = x_exact.value_or(Vector(n, 1.0));
  if (x.size() != n) throw InvalidArgument("gen_tridiag: x_exact length mismatch");
  LinearProblem p;
  p.name = "tridiag:n=" + std::to_string(n);
  p.b = multiply(a, x);
  p.a = std::move(a);
  p.x_exact = std::move(x);
  return p;
}

BvpSpec reference_bvp(std::size_t n) {
  BvpSpec spec;
  spec.n = n;
  spec.a_coeff = [](double t) { return 1.0 + t; };
  spec.b_coeff = [](double t) { return t; };
  spec.exact_u = [](double t) { return t * (1.0 - t) * std::exp(2.0 + t); };
  // f = a'u' + a u'' + b u with u' = (1 - t - t^2) e^{2+t}, u'' = -(t^2 + 3t) e^{2+t}.
  spec.forcing = [](double t) {
    const double e = std::exp(2.0 + t);
    const double du = (1.0 - t - t * t) * e;
    const double d2u = -(t * t + 3.0 * t) * e;
    const double u = t * (1.0 - t) * e;
    return du + (1.0 + t) * d2u + t * u;
  };
  return spec;
}

LinearProblem assemble_fem_bvp(const BvpSpec& spec) {
  const std::size_t n = spec.n;
  if (n < 2) throw InvalidArgument("assemble_fem_bvp: need at least 2 interior nodes");
  if (!spec.a_coeff || !spec.b_coeff || !spec.forcing) {
    throw InvalidArgument("assemble_fem_bvp: a, b and f must be supplied");
  }
  const double h = 1.0 / static_cast<double>(n + 1);
  const double g = std::sqrt(3.0 / 5.0);
  const std::array<double, 3> gauss_x{-g, 0.0, g};
  const std::array<double, 3> gauss_w{5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};

  Matrix a(n, n);
  Vector b(n);
  for (std::size_t e = 0; e <= n; ++e) {
    const double t0 = static_cast<double>(e) * h;
    // Interior indices of the element's left/right nodes; -1 marks a boundary.
    const std::array<long, 2> node{static_cast<long>(e) - 1, e < n ? static_cast<long>(e) : -1};
    for (std::size_t q = 0; q < 3; ++q) {
      const double t = t0 + 0.5 * h * (gauss_x[q] + 1.0);
      const double w = 0.5 * h * gauss_w[q];
      const double av = spec.a_coeff(t);
      const double bv = spec.b_coeff(t);
      const double fv = spec.forcing(t);
      if (!std::isfinite(av) || !std::isfinite(bv) || !std::isfinite(fv)) {
        throw QuadratureFailure("non-finite coefficient at t = " + format_double(t));
      }
      if (!(av > 0.0)) throw InvalidArgument("a(t) must be positive on [0, 1]");
      const double xi = (t - t0) / h;
      const std::array<double, 2> phi{1.0 - xi, xi};
      const std::array<double, 2> dphi{-1.0 / h, 1.0 / h};
      for (std::size_t i = 0; i < 2; ++i) {
        if (node[i] < 0) continue;
        const auto gi = static_cast<std::size_t>(node[i]);
        b[gi] += w * fv * phi[i];
        for (std::size_t j = 0; j < 2; ++j) {
          if (node[j] < 0) continue;
          const auto gj = static_cast<std::size_t>(node[j]);
          a(gi, gj) += w * (-av * dphi[i] * dphi[j] + bv * phi[i] * phi[j]);
        }
      }
    }
  }

  LinearProblem p;
  p.name = "fem:n=" + std::to_string(n);
  p.x_exact = solve_direct(a, b);
  if (spec.exact_u) {
    Vector u(n);
    for (std::size_t j = 0; j < n; ++j) u[j] = spec.exact_u(static_cast<double>(j + 1) * h);
    p.nodal_exact = std::move(u);
  }
  p.a = std::move(a);
  p.b = std::move(b);
  return p;
}

namespace {

Matrix uniform_matrix(std::size_t rows, std::size_t cols, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Matrix a(rows, cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) a(i, j) = dist(rng);
  return a;
}

Vector uniform_vector(std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Vector v(n);
  for (double& x : v) x = dist(rng);
  return v;
}

}  // namespace

LinearProblem gen_random_consistent(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  if (rows == 0 || rows > cols) throw InvalidArgument("gen_random_consistent: need 0 < rows <= cols");
  std::mt19937_64 rng(seed);
  for (int attempt = 0; attempt < 16; ++attempt) {
    Matrix a = uniform_matrix(rows, cols, rng);
    try {
      householder_qr(a.transpose());
    } catch (const RankDeficient&) {
      continue;
    }
    LinearProblem p;
    p.name = "random:rows=" + std::to_string(rows) + ",cols=" + std::to_string(cols);
    p.x_exact = uniform_vector(cols, rng);
    p.b = multiply(a, *p.x_exact);
    p.a = std::move(a);
    return p;
  }
  throw RankDeficient("gen_random_consistent: no full-rank draw after 16 attempts");
}

LinearProblem gen_random_well_conditioned(std::size_t n, std::uint64_t seed) {
  if (n == 0) throw InvalidArgument("gen_random_well_conditioned: n must be positive");
  std::mt19937_64 rng(seed);
  Matrix a = uniform_matrix(n, n, rng);
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) a(i, j) *= scale;
    a(i, i) += 2.0;
  }
  LinearProblem p;
  p.name = "wellcond:n=" + std::to_string(n);
  p.x_exact = uniform_vector(n, rng);
  p.b = multiply(a, *p.x_exact);
  p.a = std::move(a);
  return p;
}

LinearProblem make_problem(std::string_view id, std::uint64_t seed) {
  const auto colon = id.find(':');
  if (colon == std::string_view::npos) throw InvalidArgument("problem id needs a ':' : " + std::string(id));
  const std::string_view kind = id.substr(0, colon);
  std::map<std::string, std::uint64_t, std::less<>> params;
  std::string_view rest = id.substr(colon + 1);
  while (!rest.empty()) {
    const auto comma = rest.find(',');
    const std::string_view item = rest.substr(0, comma);
    const auto eq = item.find('=');
    const auto value = eq == std::string_view::npos ? std::nullopt : parse_uint(item.substr(eq + 1));
    if (!value) throw InvalidArgument("bad problem parameter '" + std::string(item) + "'");
    params[std::string(trim(item.substr(0, eq)))] = *value;
    rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
  }
  auto need = [&](std::string_view key) {
    const auto it = params.find(key);
    if (it == params.end()) {
      throw InvalidArgument("problem '" + std::string(id) + "' is missing " + std::string(key));
    }
    return static_cast<std::size_t>(it->second);
  };
  if (kind == "tridiag") return gen_tridiag(need("n"));
  if (kind == "fem") return assemble_fem_bvp(reference_bvp(need("n")));
  if (kind == "random") return gen_random_consistent(need("rows"), need("cols"), seed);
  throw InvalidArgument("unknown problem kind '" + std::string(kind) + "'");
}

// --- Matrix Market -------------------------------------------------------

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
  return out;
}

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    const std::size_t start = i;
    while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

enum class Symmetry { general, symmetric, skew };

}  // namespace

Matrix read_matrix_market_matrix(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());

  std::string line;
  std::size_t lineno = 0;
  if (!std::getline(in, line)) throw ParseError(1, "empty file");
  ++lineno;
  const auto banner = split_ws(line);
  if (banner.size() != 5 || lower(banner[0]) != "%%matrixmarket") {
    throw ParseError(lineno, "expected '%%MatrixMarket matrix <format> <field> <symmetry>'");
  }
  if (lower(banner[1]) != "matrix") throw UnsupportedField("object '" + std::string(banner[1]) + "'");
  const std::string format = lower(banner[2]);
  const std::string field = lower(banner[3]);
  const std::string sym = lower(banner[4]);
  if (format != "coordinate" && format != "array") {
    throw ParseError(lineno, "unknown format '" + std::string(banner[2]) + "'");
  }
  if (field == "complex" || field == "pattern") throw UnsupportedField("field '" + field + "' is not supported");
  if (field != "real" && field != "integer" && field != "double") {
    throw ParseError(lineno, "unknown field '" + std::string(banner[3]) + "'");
  }
  Symmetry symmetry;
  if (sym == "general") {
    symmetry = Symmetry::general;
  } else if (sym == "symmetric") {
    symmetry = Symmetry::symmetric;
  } else if (sym == "skew-symmetric") {
    symmetry = Symmetry::skew;
  } else if (sym == "hermitian") {
    throw UnsupportedField("hermitian symmetry is not supported");
  } else {
    throw ParseError(lineno, "unknown symmetry '" + std::string(banner[4]) + "'");
  }

  auto next_data_line = [&](std::vector<std::string_view>& tokens) {
    while (std::getline(in, line)) {
      ++lineno;
      const auto t = trim(line);
      if (t.empty() || t.front() == '%') continue;
      tokens = split_ws(line);
      return true;
    }
    return false;
  };
  auto to_index = [&](std::string_view tok) {
    const auto v = parse_uint(tok);
    if (!v) throw ParseError(lineno, "expected an integer, got '" + std::string(tok) + "'");
    return static_cast<std::size_t>(*v);
  };
  auto to_value = [&](std::string_view tok) {
    const auto v = parse_double(tok);
    if (!v) throw ParseError(lineno, "expected a number, got '" + std::string(tok) + "'");
    return *v;
  };

  std::vector<std::string_view> tok;
  if (!next_data_line(tok)) throw ParseError(lineno, "missing size line");
  const bool coordinate = format == "coordinate";
  if (tok.size() != (coordinate ? 3u : 2u)) throw ParseError(lineno, "malformed size line");
  const std::size_t rows = to_index(tok[0]);
  const std::size_t cols = to_index(tok[1]);
  if (symmetry != Symmetry::general && rows != cols) {
    throw ParseError(lineno, "symmetric storage requires a square matrix");
  }
  Matrix a(rows, cols);
  const double mirror = symmetry == Symmetry::skew ? -1.0 : 1.0;

  if (coordinate) {
    const std::size_t nnz = to_index(tok[2]);
    for (std::size_t e = 0; e < nnz; ++e) {
      if (!next_data_line(tok)) throw ParseError(lineno, "expected " + std::to_string(nnz) + " entries");
      if (tok.size() != 3) throw ParseError(lineno, "coordinate entry needs 'row col value'");
      const std::size_t i = to_index(tok[0]);
      const std::size_t j = to_index(tok[1]);
      if (i < 1 || i > rows || j < 1 || j > cols) throw ParseError(lineno, "index out of range");
      if (symmetry == Symmetry::skew && i == j) throw ParseError(lineno, "skew-symmetric diagonal entry");
      if (symmetry != Symmetry::general && i < j) throw ParseError(lineno, "entry above the diagonal");
      const double v = to_value(tok[2]);
      a(i - 1, j - 1) += v;
      if (symmetry != Symmetry::general && i != j) a(j - 1, i - 1) += mirror * v;
    }
  } else {
    for (std::size_t j = 0; j < cols; ++j) {
      const std::size_t first =
          symmetry == Symmetry::general ? 0 : (symmetry == Symmetry::symmetric ? j : j + 1);
      for (std::size_t i = first; i < rows; ++i) {
        if (!next_data_line(tok)) throw ParseError(lineno, "array data ended early");
        if (tok.size() != 1) throw ParseError(lineno, "array entry needs a single value");
        const double v = to_value(tok[0]);
        a(i, j) = v;
        if (symmetry != Symmetry::general && i != j) a(j, i) = mirror * v;
      }
    }
  }
  if (next_data_line(tok)) throw ParseError(lineno, "unexpected data after the last entry");
  return a;
}

std::filesystem::path rhs_companion(const std::filesystem::path& matrix_path) {
  auto p = matrix_path;
  p.replace_filename(matrix_path.stem().string() + "_b.mtx");
  return p;
}

LinearProblem read_matrix_market(const std::filesystem::path& path) {
  LinearProblem p;
  p.name = "matrix:" + path.filename().string();
  p.a = read_matrix_market_matrix(path);
  const auto companion = rhs_companion(path);
  if (std::filesystem::exists(companion)) {
    const Matrix bm = read_matrix_market_matrix(companion);
    if (bm.cols() != 1 || bm.rows() != p.a.rows()) {
      throw InvalidArgument("right-hand side " + companion.string() + " must be " +
                            std::to_string(p.a.rows()) + " x 1");
    }
    p.b = Vector(bm.rows());
    for (std::size_t i = 0; i < bm.rows(); ++i) p.b[i] = bm(i, 0);
  } else {
    Vector ones(p.a.cols(), 1.0);
    p.b = multiply(p.a, ones);
    p.x_exact = std::move(ones);
  }
  return p;
}

void write_matrix_market(const std::filesystem::path& path, const Matrix& a) {
  std::ostringstream out;
  std::size_t nnz = 0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) nnz += a(i, j) != 0.0;
  out << "%%MatrixMarket matrix coordinate real general\n";
  out << a.rows() << ' ' << a.cols() << ' ' << nnz << '\n';
  for (std::size_t j = 0; j < a.cols(); ++j)
    for (std::size_t i = 0; i < a.rows(); ++i)
      if (a(i, j) != 0.0) out << i + 1 << ' ' << j + 1 << ' ' << format_double(a(i, j)) << '\n';
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot write " + path.string());
  f << out.str();
  if (!f) throw IoError("write failed for " + path.string());
}

void write_matrix_market(const std::filesystem::path& path, const Vector& v) {
  std::ostringstream out;
  out << "%%MatrixMarket matrix array real general\n" << v.size() << " 1\n";
  for (double x : v) out << format_double(x) << '\n';
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot write " + path.string());
  f << out.str();
  if (!f) throw IoError("write failed for " + path.string());
}

}  // namespace accproj

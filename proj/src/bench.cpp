#include "accproj/bench.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <mutex>
#include <thread>

#include "json.hpp"

#include "accproj/baselines.hpp"
#include "accproj/errors.hpp"
#include "accproj/problems.hpp"
#include "accproj/text.hpp"

namespace accproj {

namespace {

constexpr std::array<double, 8> kBlockSizes{10, 15, 20, 25, 30, 35, 40, 50};
constexpr std::array<double, 5> kTolerances{1e-3, 1e-4, 1e-5, 1e-6, 1e-7};
constexpr std::array<double, 7> kRestarts{2, 5, 8, 13, 18, 25, 32};
constexpr std::array<double, 8> kJacobiBlocks{10, 15, 20, 25, 30, 35, 40, 45};
constexpr std::size_t kGmresMaxOuter = 2000;
constexpr std::size_t kFemSize = 200;

// Published iteration counts, indexed like the grids above.
constexpr std::array<double, 5> kRefT1{724, 872, 1020, 1169, 1317};
constexpr std::array<double, 8> kRefSap{11404, 2994, 1020, 443, 222, 104, 57, 27};
constexpr std::array<double, 8> kRefMsap1{2134, 403, 134, 69, 38, 34, 18, 15};
constexpr std::array<double, 8> kRefMsap2{185, 102, 42, 30, 16, 14, 10, 7};
constexpr std::array<double, 7> kRefT5Msap{200, 200, 50, 33, 22, 17, 13};
constexpr std::array<double, 7> kRefT5GmresOuter{2000, 2000, 1415, 538, 282, 148, 91};
constexpr std::array<double, 7> kRefT5GmresInner{2, 5, 7, 3, 18, 24, 28};
constexpr std::array<double, 8> kRefT7Jacobi{7836, 5347, 4082, 3316, 2806, 2440, 2159, 1946};
constexpr std::array<double, 8> kRefT7Msap{1745, 830, 390, 185, 130, 85, 55, 45};

std::string_view kernel_name(Kernel k) { return k == Kernel::naive ? "naive" : "fast"; }
std::string_view variant_name(Msap1Variant v) {
  return v == Msap1Variant::after_sweep ? "after_sweep" : "before_sweep";
}
std::string_view reset_name(WindowReset r) { return r == WindowReset::keep_oldest ? "keep_oldest" : "keep_newest"; }

std::size_t fem_block_for_restart(double restart) {
  return static_cast<std::size_t>(std::lround(std::sqrt(restart * static_cast<double>(kFemSize))));
}

struct Reference {
  std::optional<double> outer;
  std::optional<double> inner;
};

template <std::size_t N>
std::optional<double> lookup(const std::array<double, N>& grid, const std::array<double, N>& ref, double x) {
  for (std::size_t i = 0; i < N; ++i)
    if (grid[i] == x) return ref[i];
  return std::nullopt;
}

Reference reference_for(TableId id, const BenchCase& c) {
  switch (id) {
    case TableId::t1:
      return {lookup(kTolerances, kRefT1, c.param), {}};
    case TableId::t2:
      return {lookup(kBlockSizes, kRefSap, c.param), {}};
    case TableId::t3:
      return {lookup(kBlockSizes, kRefMsap1, c.param), {}};
    case TableId::t4:
      return {lookup(kBlockSizes, kRefMsap2, c.param), {}};
    case TableId::t5:
      if (c.solver == "gmres") {
        return {lookup(kRestarts, kRefT5GmresOuter, c.param), lookup(kRestarts, kRefT5GmresInner, c.param)};
      }
      return {lookup(kRestarts, kRefT5Msap, c.param), {}};
    case TableId::t7:
      if (c.solver == "jacobi") return {lookup(kJacobiBlocks, kRefT7Jacobi, c.param), {}};
      return {lookup(kJacobiBlocks, kRefT7Msap, c.param), {}};
  }
  return {};
}

/// Projection-solver cases for one grid value, one per knob combination.
void push_knobbed(std::vector<BenchCase>& out, const KnobGrid& grid, BenchCase base) {
  const bool windowed = base.solver == "msap2";
  for (double overlap : grid.overlaps) {
    base.config.overlap_fraction = overlap;
    if (!windowed) {
      out.push_back(base);
      continue;
    }
    for (std::size_t w : grid.windows) {
      for (double kappa : grid.cond_thresholds) {
        base.config.window = w;
        base.config.cond_threshold = kappa;
        out.push_back(base);
      }
    }
  }
}

BenchCase make_case(const KnobGrid& grid, std::string problem, std::string solver, std::string param_name,
                    double param) {
  BenchCase c;
  c.problem = std::move(problem);
  c.solver = std::move(solver);
  c.param_name = std::move(param_name);
  c.param = param;
  c.config.max_sweeps = grid.max_sweeps;
  c.seed = grid.seed;
  c.repeat = grid.repeat;
  return c;
}

SolveReport dispatch(const LinearProblem& p, const BenchCase& c) {
  if (c.solver == "sap") return solve_sap(p.a, p.b, c.config);
  if (c.solver == "msap1") return solve_msap1(p.a, p.b, c.config);
  if (c.solver == "msap2") return solve_msap2(p.a, p.b, c.config);
  if (c.solver == "gmres") {
    GmresConfig g;
    g.restart = c.restart;
    g.tol = c.config.tol;
    g.max_outer = c.config.max_sweeps;
    return solve_gmres(p.a, p.b, g);
  }
  if (c.solver == "jacobi") {
    JacobiConfig j;
    j.block_size = c.config.block_size;
    j.tol = c.config.tol;
    j.max_iters = c.config.max_sweeps;
    return solve_block_jacobi(p.a, p.b, j);
  }
  throw InvalidArgument("unknown solver '" + c.solver + "'");
}

void fill_from_report(BenchRow& row, const SolveReport& r, const LinearProblem& p) {
  row.converged = r.converged;
  row.iterations = r.sweeps;
  row.inner = r.inner;
  if (!r.residual_history.empty()) row.residual = r.residual_history.back();
  if (p.x_exact && r.solution.size() == p.x_exact->size()) {
    row.rel_error = norm2(*p.x_exact - r.solution) / norm2(*p.x_exact);
  }
}

BenchRow run_on(const LinearProblem& p, const BenchCase& c) {
  BenchRow row;
  row.bench_case = c;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < std::max<std::size_t>(1, c.repeat); ++k) {
    const auto t0 = std::chrono::steady_clock::now();
    try {
      fill_from_report(row, dispatch(p, c), p);
    } catch (const NotConverged& e) {
      fill_from_report(row, e.report(), p);
      row.error = "not converged";
    } catch (const Error& e) {
      row.error = e.what();
    }
    best = std::min(best, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
    if (!row.error.empty() && row.error != "not converged") break;
  }
  row.wall_seconds = best;
  return row;
}

}  // namespace

std::string_view to_string(TableId id) {
  switch (id) {
    case TableId::t1: return "t1";
    case TableId::t2: return "t2";
    case TableId::t3: return "t3";
    case TableId::t4: return "t4";
    case TableId::t5: return "t5";
    case TableId::t7: return "t7";
  }
  return "?";
}

std::optional<TableId> parse_table_id(std::string_view text) {
  for (TableId id : {TableId::t1, TableId::t2, TableId::t3, TableId::t4, TableId::t5, TableId::t7})
    if (to_string(id) == text) return id;
  return std::nullopt;
}

void KnobGrid::validate() const {
  if (overlaps.empty() || windows.empty() || cond_thresholds.empty()) {
    throw InvalidArgument("knob grid lists must be nonempty");
  }
  if (max_sweeps < 1) throw InvalidArgument("max_sweeps must be at least 1");
  if (repeat < 1) throw InvalidArgument("repeat must be at least 1");
}

std::vector<BenchCase> table_cases(TableId id, const KnobGrid& grid) {
  grid.validate();
  std::vector<BenchCase> out;
  const std::string tridiag = "tridiag:n=100";
  const std::string fem = "fem:n=" + std::to_string(kFemSize);
  switch (id) {
    case TableId::t1:
      for (double tol : kTolerances) {
        BenchCase c = make_case(grid, tridiag, "sap", "tol", tol);
        c.config.block_size = 20;
        c.config.tol = tol;
        push_knobbed(out, grid, c);
      }
      break;
    case TableId::t2:
    case TableId::t3:
    case TableId::t4: {
      const char* solver = id == TableId::t2 ? "sap" : id == TableId::t3 ? "msap1" : "msap2";
      for (double m : kBlockSizes) {
        BenchCase c = make_case(grid, tridiag, solver, "block_size", m);
        c.config.block_size = static_cast<std::size_t>(m);
        push_knobbed(out, grid, c);
      }
      break;
    }
    case TableId::t5:
      for (double r : kRestarts) {
        BenchCase g = make_case(grid, fem, "gmres", "restart", r);
        g.restart = static_cast<std::size_t>(r);
        g.config.max_sweeps = kGmresMaxOuter;
        out.push_back(g);
        BenchCase c = make_case(grid, fem, "msap2", "restart", r);
        c.config.block_size = fem_block_for_restart(r);
        push_knobbed(out, grid, c);
      }
      break;
    case TableId::t7:
      for (double m : kJacobiBlocks) {
        BenchCase j = make_case(grid, fem, "jacobi", "block_size", m);
        j.config.block_size = static_cast<std::size_t>(m);
        out.push_back(j);
        BenchCase c = make_case(grid, fem, "msap2", "block_size", m);
        c.config.block_size = static_cast<std::size_t>(m);
        push_knobbed(out, grid, c);
      }
      break;
  }
  return out;
}

BenchRow run_case(const BenchCase& bench_case) {
  const LinearProblem p = make_problem(bench_case.problem, bench_case.seed);
  return run_on(p, bench_case);
}

BenchTable run_table(TableId id, const KnobGrid& grid) {
  const std::vector<BenchCase> cases = table_cases(id, grid);
  std::map<std::string, LinearProblem> problems;
  for (const auto& c : cases)
    if (!problems.contains(c.problem)) problems.emplace(c.problem, make_problem(c.problem, c.seed));

  BenchTable table;
  table.id = id;
  table.grid = grid;
  table.rows.resize(cases.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < cases.size(); i = next++) {
      BenchRow row = run_on(problems.at(cases[i].problem), cases[i]);
      const Reference ref = reference_for(id, cases[i]);
      row.reference = ref.outer;
      row.reference_inner = ref.inner;
      table.rows[i] = std::move(row);
    }
  };
  const std::size_t jobs = std::clamp<std::size_t>(grid.jobs, 1, std::max<std::size_t>(1, cases.size()));
  std::vector<std::jthread> pool;
  for (std::size_t t = 1; t < jobs; ++t) pool.emplace_back(worker);
  worker();
  pool.clear();
  return table;
}

std::vector<BenchRow> closest_to_reference(const BenchTable& table) {
  std::vector<BenchRow> out;
  std::map<std::pair<std::string, double>, std::size_t> slot;
  for (const BenchRow& row : table.rows) {
    if (!row.reference) continue;
    const auto key = std::make_pair(row.bench_case.solver, row.bench_case.param);
    auto distance = [&](const BenchRow& r) {
      return r.converged ? std::fabs(static_cast<double>(r.iterations) - *r.reference)
                         : std::numeric_limits<double>::infinity();
    };
    const auto it = slot.find(key);
    if (it == slot.end()) {
      slot.emplace(key, out.size());
      out.push_back(row);
    } else if (distance(row) < distance(out[it->second])) {
      out[it->second] = row;
    }
  }
  return out;
}

// --- CSV ---------------------------------------------------------------------

const std::vector<std::string>& csv_columns() {
  static const std::vector<std::string> cols{
      "table",     "solver",         "problem",   "param_name", "param",     "block_size",
      "overlap",   "window",         "cond_threshold", "tol",   "max_sweeps", "restart",
      "kernel",    "msap1_variant",  "window_reset", "seed",    "repeat",    "converged",
      "iterations", "inner",         "wall_seconds", "rel_error", "residual", "reference",
      "reference_inner", "error"};
  return cols;
}

namespace {

std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  out += '"';
  return out;
}

std::string opt(const std::optional<double>& v) { return v ? format_double(*v) : std::string(); }

std::vector<std::string> row_fields(TableId id, const BenchRow& r) {
  const BenchCase& c = r.bench_case;
  const SolverConfig& k = c.config;
  return {std::string(to_string(id)),
          c.solver,
          c.problem,
          c.param_name,
          format_double(c.param),
          std::to_string(k.block_size),
          format_double(k.overlap_fraction),
          std::to_string(k.window),
          format_double(k.cond_threshold),
          format_double(k.tol),
          std::to_string(k.max_sweeps),
          std::to_string(c.restart),
          std::string(kernel_name(k.kernel)),
          std::string(variant_name(k.msap1_variant)),
          std::string(reset_name(k.window_reset)),
          std::to_string(c.seed),
          std::to_string(c.repeat),
          r.converged ? "true" : "false",
          std::to_string(r.iterations),
          std::to_string(r.inner),
          format_double(r.wall_seconds),
          opt(r.rel_error),
          opt(r.residual),
          opt(r.reference),
          opt(r.reference_inner),
          r.error};
}

/// Splits RFC-4180 text into records. Line numbers are 1-based physical lines.
std::vector<std::pair<std::size_t, std::vector<std::string>>> split_records(std::string_view text) {
  std::vector<std::pair<std::size_t, std::vector<std::string>>> records;
  std::vector<std::string> fields;
  std::string field;
  std::size_t line = 1;
  std::size_t record_line = 1;
  bool quoted = false;
  bool was_quoted = false;
  std::size_t i = 0;
  auto end_field = [&] {
    fields.push_back(std::move(field));
    field.clear();
    was_quoted = false;
  };
  while (i < text.size()) {
    const char ch = text[i];
    if (quoted) {
      if (ch == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        if (ch == '\n') ++line;
        field += ch;
      }
      ++i;
      continue;
    }
    if (ch == '"') {
      if (!field.empty() || was_quoted) throw ParseError(line, "stray quote inside a field");
      quoted = was_quoted = true;
    } else if (ch == ',') {
      end_field();
    } else if (ch == '\r' || ch == '\n') {
      if (ch == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
      end_field();
      records.emplace_back(record_line, std::move(fields));
      fields.clear();
      ++line;
      record_line = line;
    } else {
      if (was_quoted) throw ParseError(line, "text after a closing quote");
      field += ch;
    }
    ++i;
  }
  if (quoted) throw ParseError(line, "unterminated quoted field");
  if (!field.empty() || !fields.empty() || was_quoted) {
    end_field();
    records.emplace_back(record_line, std::move(fields));
  }
  return records;
}

}  // namespace

std::string to_csv(const BenchTable& table) {
  std::string out;
  auto write = [&out](const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (i) out += ',';
      out += csv_field(fields[i]);
    }
    out += "\r\n";
  };
  write(csv_columns());
  for (const BenchRow& r : table.rows) write(row_fields(table.id, r));
  return out;
}

BenchTable parse_csv(std::string_view text) {
  const auto records = split_records(text);
  if (records.empty()) throw ParseError(1, "empty report");
  if (records.front().second != csv_columns()) throw ParseError(1, "unexpected header");

  BenchTable table;
  bool have_id = false;
  for (std::size_t k = 1; k < records.size(); ++k) {
    const auto& [line, f] = records[k];
    if (f.size() != csv_columns().size()) {
      throw ParseError(line, "expected " + std::to_string(csv_columns().size()) + " fields, got " +
                                 std::to_string(f.size()));
    }
    auto num = [&, line = line](const std::string& s) {
      const auto v = parse_double(s);
      if (!v) throw ParseError(line, "bad number '" + s + "'");
      return *v;
    };
    auto count = [&, line = line](const std::string& s) {
      const auto v = parse_uint(s);
      if (!v) throw ParseError(line, "bad count '" + s + "'");
      return static_cast<std::size_t>(*v);
    };
    auto maybe = [&](const std::string& s) -> std::optional<double> {
      if (s.empty()) return std::nullopt;
      return num(s);
    };
    const auto id = parse_table_id(f[0]);
    if (!id) throw ParseError(line, "unknown table '" + f[0] + "'");
    if (have_id && *id != table.id) throw ParseError(line, "mixed tables in one report");
    table.id = *id;
    have_id = true;

    BenchRow r;
    BenchCase& c = r.bench_case;
    c.solver = f[1];
    c.problem = f[2];
    c.param_name = f[3];
    c.param = num(f[4]);
    c.config.block_size = count(f[5]);
    c.config.overlap_fraction = num(f[6]);
    c.config.window = count(f[7]);
    c.config.cond_threshold = num(f[8]);
    c.config.tol = num(f[9]);
    c.config.max_sweeps = count(f[10]);
    c.restart = count(f[11]);
    if (f[12] == "naive") {
      c.config.kernel = Kernel::naive;
    } else if (f[12] == "fast") {
      c.config.kernel = Kernel::fast;
    } else {
      throw ParseError(line, "unknown kernel '" + f[12] + "'");
    }
    if (f[13] == "after_sweep") {
      c.config.msap1_variant = Msap1Variant::after_sweep;
    } else if (f[13] == "before_sweep") {
      c.config.msap1_variant = Msap1Variant::before_sweep;
    } else {
      throw ParseError(line, "unknown msap1 variant '" + f[13] + "'");
    }
    if (f[14] == "keep_oldest") {
      c.config.window_reset = WindowReset::keep_oldest;
    } else if (f[14] == "keep_newest") {
      c.config.window_reset = WindowReset::keep_newest;
    } else {
      throw ParseError(line, "unknown window reset '" + f[14] + "'");
    }
    c.seed = count(f[15]);
    c.repeat = count(f[16]);
    if (f[17] != "true" && f[17] != "false") throw ParseError(line, "converged must be true or false");
    r.converged = f[17] == "true";
    r.iterations = count(f[18]);
    r.inner = count(f[19]);
    r.wall_seconds = num(f[20]);
    r.rel_error = maybe(f[21]);
    r.residual = maybe(f[22]);
    r.reference = maybe(f[23]);
    r.reference_inner = maybe(f[24]);
    r.error = f[25];
    table.rows.push_back(std::move(r));
  }
  return table;
}

// --- JSON --------------------------------------------------------------------

std::string to_json(const BenchTable& table) {
  using nlohmann::ordered_json;
  auto opt_json = [](const std::optional<double>& v) { return v ? ordered_json(*v) : ordered_json(nullptr); };
  ordered_json doc;
  doc["table"] = to_string(table.id);
  doc["grid"] = {{"overlaps", table.grid.overlaps},
                 {"windows", table.grid.windows},
                 {"cond_thresholds", table.grid.cond_thresholds},
                 {"max_sweeps", table.grid.max_sweeps},
                 {"jobs", table.grid.jobs},
                 {"seed", table.grid.seed},
                 {"repeat", table.grid.repeat}};
  ordered_json rows = ordered_json::array();
  for (const BenchRow& r : table.rows) {
    const BenchCase& c = r.bench_case;
    const SolverConfig& k = c.config;
    ordered_json row;
    row["solver"] = c.solver;
    row["problem"] = c.problem;
    row["param_name"] = c.param_name;
    row["param"] = c.param;
    row["config"] = {{"block_size", k.block_size},
                     {"overlap_fraction", k.overlap_fraction},
                     {"tol", k.tol},
                     {"max_sweeps", k.max_sweeps},
                     {"window", k.window},
                     {"cond_threshold", k.cond_threshold},
                     {"kernel", kernel_name(k.kernel)},
                     {"msap1_variant", variant_name(k.msap1_variant)},
                     {"window_reset", reset_name(k.window_reset)},
                     {"restart", c.restart},
                     {"seed", c.seed},
                     {"repeat", c.repeat}};
    row["converged"] = r.converged;
    row["iterations"] = r.iterations;
    row["inner"] = r.inner;
    row["wall_seconds"] = r.wall_seconds;
    row["rel_error"] = opt_json(r.rel_error);
    row["residual"] = opt_json(r.residual);
    row["reference"] = opt_json(r.reference);
    row["reference_inner"] = opt_json(r.reference_inner);
    row["error"] = r.error;
    rows.push_back(std::move(row));
  }
  doc["rows"] = std::move(rows);
  return doc.dump(2) + "\n";
}

void emit_report(const BenchTable& table, ReportFormat format, const std::filesystem::path& path) {
  if (table.rows.empty()) throw InvalidArgument("refusing to write an empty report");
  const std::string body = format == ReportFormat::csv ? to_csv(table) : to_json(table);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << body;
  out.close();
  if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace accproj

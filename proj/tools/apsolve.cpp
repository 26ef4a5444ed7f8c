// apsolve: command-line front end for the accumulated-projection solvers.
//
//   apsolve solve  --problem tridiag:n=100 --solver msap2
//   apsolve bench  --table t4 --out results
//   apsolve gen    --problem fem:n=200 --out fem200.mtx
//   apsolve verify --sizes 5,10,20
//
// Exit status: 0 success, 1 usage or input error, 2 no convergence.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "accproj/baselines.hpp"
#include "accproj/bench.hpp"
#include "accproj/errors.hpp"
#include "accproj/problems.hpp"
#include "accproj/solvers.hpp"
#include "accproj/text.hpp"
#include "accproj/verify.hpp"

namespace {

using namespace accproj;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitNotConverged = 2;

/// Usage problems found after CLI11 parsing.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

double number(const std::string& flag, const std::string& text) {
  const auto v = parse_double(text);
  if (!v) throw UsageError(flag + ": expected a number, got '" + text + "'");
  return *v;
}

std::size_t count(const std::string& flag, const std::string& text) {
  const auto v = parse_uint(text);
  if (!v) throw UsageError(flag + ": expected a nonnegative integer, got '" + text + "'");
  return static_cast<std::size_t>(*v);
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = text.find(',', start);
    out.emplace_back(trim(std::string_view(text).substr(start, comma - start)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

template <typename T, typename F>
std::vector<T> parse_list(const std::string& flag, const std::string& text, F one) {
  std::vector<T> out;
  for (const auto& item : split_list(text)) out.push_back(one(flag, item));
  if (out.empty()) throw UsageError(flag + ": empty list");
  return out;
}

/// Raw flag text, parsed by hand so that number syntax never depends on the
/// locale.
struct SolveFlags {
  std::string matrix, problem, solver = "sap", block_size = "20", overlap = "0.5", tol = "1e-5",
      max_sweeps = "100000", window = "5", cond_threshold = "1e8", restart = "20", seed = "1", report;
};

struct BenchFlags {
  std::string table, out, overlap = "0.5", window = "5", cond_threshold = "1e8", max_sweeps = "100000",
      jobs = "1", seed = "1";
};

struct GenFlags {
  std::string problem, out, seed = "1";
};

struct VerifyFlags {
  std::string seed = "1", sizes = "10,30,60";
};

nlohmann::ordered_json report_json(const SolveReport& r, const std::string& problem, const SolverConfig& config,
                                   std::size_t restart, const std::optional<double>& rel_error) {
  nlohmann::ordered_json j;
  j["solver"] = r.solver;
  j["problem"] = problem;
  j["config"] = {{"block_size", config.block_size},         {"overlap_fraction", config.overlap_fraction},
                 {"tol", config.tol},                       {"max_sweeps", config.max_sweeps},
                 {"window", config.window},                 {"cond_threshold", config.cond_threshold},
                 {"restart", restart}};
  j["converged"] = r.converged;
  j["sweeps"] = r.sweeps;
  j["inner"] = r.inner;
  j["block_steps"] = r.block_steps;
  j["residual"] = r.residual_history.empty() ? nlohmann::ordered_json(nullptr)
                                             : nlohmann::ordered_json(r.residual_history.back());
  j["rel_error"] = rel_error ? nlohmann::ordered_json(*rel_error) : nlohmann::ordered_json(nullptr);
  j["wall_seconds"] = r.wall_seconds;
  j["acceleration"] = {{"window", r.acceleration.window},
                       {"ill_conditioned", r.acceleration.ill_conditioned},
                       {"two_vector", r.acceleration.two_vector},
                       {"skipped", r.acceleration.skipped}};
  j["residual_history"] = r.residual_history;
  j["pnorm_history"] = r.pnorm_history;
  auto log = nlohmann::ordered_json::array();
  for (const auto& v : r.invariant_log) {
    log.push_back({{"sweep", v.sweep}, {"check", v.check}, {"value", v.value}, {"limit", v.limit}});
  }
  j["invariant_log"] = std::move(log);
  return j;
}

void write_text(const std::filesystem::path& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << body;
  if (!out) throw IoError("write failed for " + path.string());
}

int cmd_solve(const SolveFlags& f) {
  if (f.matrix.empty() == f.problem.empty()) throw UsageError("solve: give exactly one of --matrix or --problem");
  SolverConfig config;
  config.block_size = count("--block-size", f.block_size);
  config.overlap_fraction = number("--overlap", f.overlap);
  config.tol = number("--tol", f.tol);
  config.max_sweeps = count("--max-sweeps", f.max_sweeps);
  config.window = count("--window", f.window);
  config.cond_threshold = number("--cond-threshold", f.cond_threshold);
  const std::size_t restart = count("--restart", f.restart);
  const std::uint64_t seed = count("--seed", f.seed);

  const LinearProblem p = f.matrix.empty() ? make_problem(f.problem, seed) : read_matrix_market(f.matrix);

  SolveReport report;
  bool converged = true;
  try {
    if (f.solver == "sap") {
      report = solve_sap(p.a, p.b, config);
    } else if (f.solver == "msap1") {
      report = solve_msap1(p.a, p.b, config);
    } else if (f.solver == "msap2") {
      report = solve_msap2(p.a, p.b, config);
    } else if (f.solver == "gmres") {
      GmresConfig g;
      g.restart = restart;
      g.tol = config.tol;
      g.max_outer = config.max_sweeps;
      report = solve_gmres(p.a, p.b, g);
    } else {
      JacobiConfig j;
      j.block_size = config.block_size;
      j.tol = config.tol;
      j.max_iters = config.max_sweeps;
      report = solve_block_jacobi(p.a, p.b, j);
    }
  } catch (const NotConverged& e) {
    report = e.report();
    converged = false;
  }

  const double residual = report.residual_history.empty() ? relative_residual(p.a, p.b, report.solution)
                                                          : report.residual_history.back();
  std::cout << "solver=" << f.solver << " sweeps=" << report.sweeps << " residual=" << format_double(residual)
            << std::endl;
  if (!converged) std::cerr << "not converged after " << report.sweeps << " iterations\n";

  if (!f.report.empty()) {
    std::optional<double> rel_error;
    if (p.x_exact) rel_error = norm2(*p.x_exact - report.solution) / norm2(*p.x_exact);
    write_text(f.report, report_json(report, p.name, config, restart, rel_error).dump(2) + "\n");
  }
  return converged ? kExitOk : kExitNotConverged;
}

int cmd_bench(const BenchFlags& f) {
  const auto id = parse_table_id(f.table);
  if (!id) throw UsageError("bench: unknown table '" + f.table + "' (expected t1, t2, t3, t4, t5 or t7)");
  KnobGrid grid;
  grid.overlaps = parse_list<double>("--overlap", f.overlap, number);
  grid.windows = parse_list<std::size_t>("--window", f.window, count);
  grid.cond_thresholds = parse_list<double>("--cond-threshold", f.cond_threshold, number);
  grid.max_sweeps = count("--max-sweeps", f.max_sweeps);
  grid.jobs = count("--jobs", f.jobs);
  grid.seed = count("--seed", f.seed);

  const BenchTable table = run_table(*id, grid);
  std::filesystem::create_directories(f.out);
  const std::filesystem::path dir(f.out);
  const std::string stem(to_string(*id));
  emit_report(table, ReportFormat::csv, dir / (stem + ".csv"));
  emit_report(table, ReportFormat::json, dir / (stem + ".json"));

  for (const BenchRow& r : table.rows) {
    const BenchCase& c = r.bench_case;
    std::cout << stem << ' ' << c.solver << ' ' << c.param_name << '=' << format_double(c.param)
              << " overlap=" << format_double(c.config.overlap_fraction);
    if (c.solver == "msap2") {
      std::cout << " window=" << c.config.window << " cond=" << format_double(c.config.cond_threshold);
    }
    std::cout << " iters=" << r.iterations;
    if (c.solver == "gmres") std::cout << " inner=" << r.inner;
    if (!r.converged) std::cout << " (not converged)";
    if (r.reference) {
      std::cout << " reference=" << format_double(*r.reference)
                << " diff=" << format_double(static_cast<double>(r.iterations) - *r.reference);
    }
    if (!r.error.empty() && r.error != "not converged") std::cout << " error=\"" << r.error << '"';
    std::cout << '\n';
  }
  for (const BenchRow& r : closest_to_reference(table)) {
    const BenchCase& c = r.bench_case;
    std::cout << "closest " << c.solver << ' ' << c.param_name << '=' << format_double(c.param)
              << " iters=" << r.iterations << " reference=" << format_double(*r.reference)
              << " overlap=" << format_double(c.config.overlap_fraction);
    if (c.solver == "msap2") {
      std::cout << " window=" << c.config.window << " cond=" << format_double(c.config.cond_threshold);
    }
    std::cout << '\n';
  }
  std::cout << "wrote " << (dir / (stem + ".csv")).string() << " and " << (dir / (stem + ".json")).string()
            << std::endl;
  return kExitOk;
}

int cmd_gen(const GenFlags& f) {
  const LinearProblem p = make_problem(f.problem, count("--seed", f.seed));
  const std::filesystem::path out(f.out);
  write_matrix_market(out, p.a);
  write_matrix_market(rhs_companion(out), p.b);
  std::cout << "wrote " << out.string() << " and " << rhs_companion(out).string() << std::endl;
  return kExitOk;
}

int cmd_verify(const VerifyFlags& f) {
  VerifyOptions options;
  options.seed = count("--seed", f.seed);
  options.sizes = parse_list<std::size_t>("--sizes", f.sizes, count);
  const VerifyReport report = run_verify(options);
  for (const CheckResult& c : report.checks) {
    std::cout << (c.passed ? "PASS " : "FAIL ") << c.name << " events=" << c.events
              << " worst=" << format_double(c.worst) << " limit=" << format_double(c.limit) << '\n';
    if (!c.passed) std::cout << "  first counterexample: " << c.counterexample << '\n';
  }
  std::cout << "step events=" << report.step_events << std::endl;
  return report.all_passed() ? kExitOk : kExitNotConverged;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Accumulated-projection linear solvers"};
  app.require_subcommand(1);

  SolveFlags solve;
  auto* s = app.add_subcommand("solve", "Solve one system and print the convergence line");
  auto* matrix = s->add_option("--matrix", solve.matrix, "Matrix Market file (b from <stem>_b.mtx or A*ones)");
  auto* problem = s->add_option("--problem", solve.problem, "tridiag:n=N | fem:n=N | random:rows=R,cols=C");
  matrix->excludes(problem);
  s->add_option("--solver", solve.solver, "sap | msap1 | msap2 | gmres | jacobi")
      ->check(CLI::IsMember({"sap", "msap1", "msap2", "gmres", "jacobi"}));
  s->add_option("--block-size", solve.block_size, "Rows per block (default 20)");
  s->add_option("--overlap", solve.overlap, "Fraction of rows shared by adjacent blocks (default 0.5)");
  s->add_option("--tol", solve.tol, "Relative residual tolerance (default 1e-5)");
  s->add_option("--max-sweeps", solve.max_sweeps, "Iteration budget (default 100000)");
  s->add_option("--window", solve.window, "msap2 window size (default 5)");
  s->add_option("--cond-threshold", solve.cond_threshold, "msap2 condition threshold (default 1e8)");
  s->add_option("--restart", solve.restart, "gmres restart length (default 20)");
  s->add_option("--seed", solve.seed, "Seed for random problems (default 1)");
  s->add_option("--report", solve.report, "Write a JSON report here");

  BenchFlags bench;
  auto* b = app.add_subcommand("bench", "Run one experiment table");
  b->add_option("--table", bench.table, "t1 | t2 | t3 | t4 | t5 | t7")->required();
  b->add_option("--out", bench.out, "Output directory")->required();
  b->add_option("--overlap", bench.overlap, "Comma-separated overlap fractions (default 0.5)");
  b->add_option("--window", bench.window, "Comma-separated msap2 windows (default 5)");
  b->add_option("--cond-threshold", bench.cond_threshold, "Comma-separated msap2 thresholds (default 1e8)");
  b->add_option("--max-sweeps", bench.max_sweeps, "Iteration budget per case (default 100000)");
  b->add_option("--jobs", bench.jobs, "Worker threads (default 1)");
  b->add_option("--seed", bench.seed, "Seed (default 1)");

  GenFlags gen;
  auto* g = app.add_subcommand("gen", "Write a generated problem as Matrix Market files");
  g->add_option("--problem", gen.problem, "tridiag:n=N | fem:n=N | random:rows=R,cols=C")->required();
  g->add_option("--out", gen.out, "Matrix file; the right-hand side goes to <stem>_b.mtx")->required();
  g->add_option("--seed", gen.seed, "Seed for random problems (default 1)");

  VerifyFlags verify;
  auto* v = app.add_subcommand("verify", "Run the projection invariant suite");
  v->add_option("--seed", verify.seed, "Seed (default 1)");
  v->add_option("--sizes", verify.sizes, "Comma-separated random system orders (default 10,30,60)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (s->parsed()) return cmd_solve(solve);
    if (b->parsed()) return cmd_bench(bench);
    if (g->parsed()) return cmd_gen(gen);
    return cmd_verify(verify);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n" << app.help() << std::flush;
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return kExitUsage;
  }
}

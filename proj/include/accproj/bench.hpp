#pragma once

// Iteration-count experiments on the tridiagonal and FEM model problems, with
// published reference counts carried alongside each row.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "accproj/solvers.hpp"

namespace accproj {

enum class TableId { t1, t2, t3, t4, t5, t7 };

std::string_view to_string(TableId id);
std::optional<TableId> parse_table_id(std::string_view text);

/// Settings the published runs leave open. Every projection-solver grid point
/// is run once per combination (window/threshold only matter for msap2).
struct KnobGrid {
  std::vector<double> overlaps{0.5};
  std::vector<std::size_t> windows{5};
  std::vector<double> cond_thresholds{1e8};
  std::size_t max_sweeps = 100000;
  std::size_t jobs = 1;
  std::uint64_t seed = 1;
  std::size_t repeat = 1;

  void validate() const;
};

struct BenchCase {
  std::string problem;  // make_problem id
  std::string solver;   // sap | msap1 | msap2 | gmres | jacobi
  std::string param_name;  // the swept quantity: block_size, tol or restart
  double param = 0.0;
  SolverConfig config;       // block_size, tol, max_sweeps and knobs
  std::size_t restart = 0;   // gmres only
  std::uint64_t seed = 1;
  std::size_t repeat = 1;
};

struct BenchRow {
  BenchCase bench_case;
  bool converged = false;
  std::size_t iterations = 0;
  std::size_t inner = 0;  // gmres: steps in the final cycle
  double wall_seconds = 0.0;
  std::optional<double> rel_error;  // |x - approx| / |x| when x is known
  std::optional<double> residual;
  std::optional<double> reference;        // published iteration count
  std::optional<double> reference_inner;  // published gmres inner count
  std::string error;                  // empty unless the case failed
};

struct BenchTable {
  TableId id = TableId::t2;
  KnobGrid grid;
  std::vector<BenchRow> rows;
};

/// Expands the published grid of a table into cases, in canonical order.
std::vector<BenchCase> table_cases(TableId id, const KnobGrid& grid);

/// Runs every case on up to grid.jobs threads. Rows come back in canonical
/// order whatever the completion order; case failures are recorded in-row.
BenchTable run_table(TableId id, const KnobGrid& grid);

BenchRow run_case(const BenchCase& bench_case);

/// For each (solver, param) with a published value, the row whose iteration
/// count is closest to it across the knob grid.
std::vector<BenchRow> closest_to_reference(const BenchTable& table);

/// Column names of the CSV form, in output order.
const std::vector<std::string>& csv_columns();

std::string to_csv(const BenchTable& table);
/// Inverse of to_csv. Throws ParseError.
BenchTable parse_csv(std::string_view text);
std::string to_json(const BenchTable& table);

enum class ReportFormat { csv, json };

/// Writes the table. Throws InvalidArgument for an empty table (no file is
/// created) and IoError on write failure.
void emit_report(const BenchTable& table, ReportFormat format, const std::filesystem::path& path);

}  // namespace accproj

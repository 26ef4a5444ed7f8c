#include "accproj/solvers.hpp"

#include <chrono>
#include <cmath>
#include <deque>
#include <functional>
#include <limits>
#include <memory>
#include <vector>

#include "accproj/errors.hpp"
#include "accproj/partition.hpp"

namespace accproj {

void SolverConfig::validate() const {
  if (!(tol > 0.0)) throw InvalidArgument("tolerance must be positive");
  if (max_sweeps < 1) throw InvalidArgument("max_sweeps must be at least 1");
  if (window < 2) throw InvalidArgument("window must be at least 2");
  if (!(cond_threshold > 1.0)) throw InvalidArgument("condition threshold must exceed 1");
}

namespace {

constexpr double kBookkeepingTol = 1e-8;
constexpr double kMonotoneSlack = 1e-10;

double cosine(const Vector& u, const Vector& v) {
  const double nu = norm2(u);
  const double nv = norm2(v);
  if (nu == 0.0 || nv == 0.0) return 0.0;
  return std::fabs(dot(u, v)) / (nu * nv);
}

/// Projection onto span{older, newer}; falls back to `newer` when the pair is
/// rank deficient or, with `guard`, has cosine above kParallelCosine.
ProjectionState two_vector_step(const ProjectionState& older, const ProjectionState& newer,
                                AccelerationStats& stats, bool count_as_step, bool guard) {
  if (guard && cosine(older.p, newer.p) > kParallelCosine) {
    ++stats.skipped;
    return newer;
  }
  try {
    const Vector vs[] = {older.p, newer.p};
    const double cs[] = {older.c, newer.c};
    ProjectionState out = window_project(vs, cs);
    if (count_as_step) ++stats.two_vector;
    return out;
  } catch (const RankDeficient&) {
    ++stats.skipped;
    return newer;
  }
}

/// Post-processes the sweep output. `prev` is x_s, `swept` is the sweep
/// output, `s` the zero-based sweep index.
using Accelerator = std::function<ProjectionState(const ProjectionState& prev, ProjectionState swept,
                                                  std::size_t s, AccelerationStats& stats)>;
/// Optionally replaces the sweep starting point.
using Preconditioner =
    std::function<ProjectionState(const ProjectionState& current, std::size_t s, AccelerationStats& stats)>;

SolveReport drive(const char* name, const Matrix& a, const Vector& b, const SolverConfig& config,
                  const Accelerator& accelerate, const Preconditioner& restart = {}) {
  config.validate();
  const auto t0 = std::chrono::steady_clock::now();

  const BlockPartition partition =
      build_partition(a, b, BlockSpec{config.block_size, config.overlap_fraction, {}});

  SolveReport report;
  report.solver = name;
  ProjectionState state = init_state(a, b);

  auto record = [&](const ProjectionState& st) {
    const double res = relative_residual(a, b, st.p);
    const double pn = norm2(st.p);
    const std::size_t s = report.sweeps;
    const double defect = bookkeeping_defect(st);
    if (!(defect <= kBookkeepingTol)) {
      report.invariant_log.push_back({s, "bookkeeping c = p'p", defect, kBookkeepingTol});
    }
    if (!report.pnorm_history.empty()) {
      const double prev = report.pnorm_history.back();
      if (pn < prev * (1.0 - kMonotoneSlack)) {
        report.invariant_log.push_back({s, "monotone |x_s|", (prev - pn) / prev, kMonotoneSlack});
      }
    }
    report.residual_history.push_back(res);
    report.pnorm_history.push_back(pn);
    return res;
  };

  double res = record(state);
  while (!(res <= config.tol) && report.sweeps < config.max_sweeps) {
    const std::size_t s = report.sweeps;
    ProjectionState start = restart ? restart(state, s, report.acceleration) : state;
    ProjectionState swept = ap_sweep(std::move(start), partition, config.kernel);
    report.block_steps += partition.size();
    const double swept_norm = norm2(swept.p);
    ProjectionState next = accelerate ? accelerate(state, std::move(swept), s, report.acceleration)
                                      : std::move(swept);

    if (accelerate && norm2(next.p) < swept_norm * (1.0 - kMonotoneSlack)) {
      report.invariant_log.push_back(
          {s + 1, "acceleration keeps |p|", (swept_norm - norm2(next.p)) / swept_norm, kMonotoneSlack});
    }
    state = std::move(next);
    ++report.sweeps;
    res = record(state);
    if (!all_finite(state.p)) break;
  }

  report.converged = res <= config.tol;
  report.c = state.c;
  report.solution = std::move(state.p);
  report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (!report.converged) throw NotConverged(std::move(report));
  return report;
}

}  // namespace

SolveReport solve_sap(const Matrix& a, const Vector& b, const SolverConfig& config) {
  return drive("sap", a, b, config, {});
}

SolveReport solve_msap1(const Matrix& a, const Vector& b, const SolverConfig& config) {
  if (config.msap1_variant == Msap1Variant::after_sweep) {
    return drive("msap1", a, b, config,
                 [](const ProjectionState& prev, ProjectionState swept, std::size_t s,
                    AccelerationStats& stats) {
                   if (s == 0) return swept;
                   return two_vector_step(prev, swept, stats, true, true);
                 });
  }
  // The previous sweep output, needed to rebuild span{x_s, x_{s-1}}.
  auto older = std::make_shared<ProjectionState>();
  return drive(
      "msap1", a, b, config, {},
      [older](const ProjectionState& current, std::size_t s, AccelerationStats& stats) {
        ProjectionState start = s == 0 ? current : two_vector_step(*older, current, stats, true, true);
        *older = current;
        return start;
      });
}

SolveReport solve_msap2(const Matrix& a, const Vector& b, const SolverConfig& config) {
  struct Window {
    std::deque<Vector> rows;
    std::deque<double> inner;
  };
  auto window = std::make_shared<Window>();
  const std::size_t width = config.window;
  const double kappa_max = config.cond_threshold;
  const WindowReset reset = config.window_reset;

  return drive("msap2", a, b, config,
               [=](const ProjectionState& prev, ProjectionState swept, std::size_t,
                   AccelerationStats& stats) {
                 window->rows.push_back(swept.p);
                 window->inner.push_back(swept.c);
                 if (window->rows.size() < width) return two_vector_step(prev, swept, stats, true, false);

                 const std::vector<Vector> rows(window->rows.begin(), window->rows.end());
                 const std::vector<double> inner(window->inner.begin(), window->inner.end());
                 double kappa = std::numeric_limits<double>::infinity();
                 try {
                   kappa = condition_estimate(Matrix::from_columns(rows).transpose());
                 } catch (const ZeroMatrix&) {
                 }
                 if (kappa <= kappa_max) {
                   try {
                     ProjectionState out = window_project(rows, inner);
                     window->rows.pop_front();
                     window->inner.pop_front();
                     ++stats.window;
                     return out;
                   } catch (const RankDeficient&) {
                   }
                 }
                 ++stats.ill_conditioned;
                 if (reset == WindowReset::keep_oldest) {
                   window->rows.resize(1);
                   window->inner.resize(1);
                 } else {
                   window->rows.erase(window->rows.begin(), window->rows.end() - 1);
                   window->inner.erase(window->inner.begin(), window->inner.end() - 1);
                 }
                 return two_vector_step(prev, swept, stats, false, false);
               });
}

}  // namespace accproj

#include "accproj/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "accproj/errors.hpp"
#include "accproj/problems.hpp"
#include "accproj/text.hpp"

namespace accproj {

namespace {

constexpr double kBookkeeping = 1e-8;
constexpr double kOrthogonality = 1e-8;
constexpr double kPythagoras = 1e-8;
constexpr double kTelescoping = 1e-8;
constexpr double kMonotone = 1e-10;
constexpr double kEquivalence = 1e-10;
constexpr double kGridSlack = 1e-9;
constexpr double kLowerSlack = 1e-12;

struct Checks {
  CheckResult bookkeeping{"bookkeeping c = p'p", true, 0, 0.0, kBookkeeping, {}};
  CheckResult orthogonality{"orthogonality of successive projections", true, 0, 0.0, kOrthogonality, {}};
  CheckResult pythagoras{"pythagorean growth", true, 0, 0.0, kPythagoras, {}};
  CheckResult telescoping{"telescoping over a sweep", true, 0, 0.0, kTelescoping, {}};
  CheckResult monotone{"nondecreasing |p|", true, 0, 0.0, kMonotone, {}};
  CheckResult equivalence{"naive and fast sweeps agree", true, 0, 0.0, kEquivalence, {}};
  CheckResult maximality{"two-vector combination is maximal", true, 0, 0.0, kGridSlack, {}};
};

void record(CheckResult& check, double value, const std::string& where) {
  ++check.events;
  check.worst = std::max(check.worst, std::isnan(value) ? std::numeric_limits<double>::infinity() : value);
  if (!(value <= check.limit) && check.passed) {
    check.passed = false;
    check.counterexample = where + ": value " + format_double(value) + " > " + format_double(check.limit);
  }
}

double rel_diff(const Vector& a, const Vector& b) {
  const double scale = std::max(norm2(a), norm2(b));
  return scale == 0.0 ? 0.0 : norm2(a - b) / scale;
}

/// Naive-kernel sweep with the in-range fallback.
ProjectionState naive_sweep(ProjectionState state, const BlockPartition& partition) {
  return ap_sweep(std::move(state), partition, Kernel::naive);
}

void check_system(const std::string& label, const LinearProblem& problem, std::size_t block_size,
                  std::size_t sweeps, const StepFn& step, Checks& checks, std::size_t& events) {
  const BlockPartition partition = build_partition(problem.a, problem.b, BlockSpec{block_size, 0.5, {}});
  const Vector& x = *problem.x_exact;
  const double xn = norm2(x);
  ProjectionState state = init_state(problem.a, problem.b);

  for (std::size_t s = 0; s < sweeps; ++s) {
    const ProjectionState start = state;
    double increments = 0.0;
    for (std::size_t i = 0; i < partition.size(); ++i) {
      const ProjectionState next = step(state, partition, i);
      ++events;
      std::ostringstream where;
      where << label << " sweep " << s << " block " << i;
      const std::string at = where.str();

      const double pp_new = dot(next.p, next.p);
      const double pp_old = dot(state.p, state.p);
      const double n_new = std::sqrt(pp_new);
      const double n_old = std::sqrt(pp_old);
      const Vector delta = next.p - state.p;
      const double dd = dot(delta, delta);
      const Vector err = x - next.p;

      record(checks.bookkeeping, bookkeeping_defect(next), at);
      const double orth = std::max({std::fabs(dot(delta, state.p)) / std::max(n_new * n_old, 1e-300),
                                    std::fabs(dot(err, next.p)) / std::max(xn * n_new, 1e-300),
                                    std::fabs(dot(err, state.p)) / std::max(xn * n_old, 1e-300)});
      record(checks.orthogonality, orth, at);
      record(checks.pythagoras, std::fabs(pp_old + dd - pp_new) / std::max(pp_new, 1e-300), at);
      record(checks.monotone, n_old > 0.0 ? (n_old - n_new) / n_old : 0.0, at);
      increments += dd;
      state = next;
    }
    const double pk = dot(state.p, state.p);
    const double p0 = dot(start.p, start.p);
    record(checks.telescoping, std::fabs(pk - p0 - increments) / std::max(pk, 1e-300),
           label + " sweep " + std::to_string(s));

    // The step under test against the Gram-system form of the same sweep.
    const ProjectionState& fast = state;
    const ProjectionState naive = naive_sweep(start, partition);
    const double cdiff = std::fabs(fast.c - naive.c) / std::max(std::fabs(naive.c), 1e-300);
    record(checks.equivalence, std::max(rel_diff(fast.p, naive.p), cdiff), label + " sweep " + std::to_string(s));
  }
}

void check_two_vector(const VerifyOptions& options, CheckResult& check) {
  std::mt19937_64 rng(options.seed);
  std::uniform_real_distribution<double> val(-1.0, 1.0);
  std::uniform_real_distribution<double> cosine(-0.99, 0.99);
  const std::size_t points = std::max<std::size_t>(2, options.two_vector_grid);
  for (std::size_t d = 0; d < options.two_vector_draws; ++d) {
    const double b1 = val(rng);
    const double b2 = val(rng);
    const double alpha = cosine(rng);
    TwoVectorResult res;
    try {
      res = optimal_two_vector(b1, b2, alpha);
    } catch (const DegenerateDirection&) {
      continue;
    }
    double best = 0.0;
    for (std::size_t k = 0; k < points; ++k) {
      const double t = -100.0 + 200.0 * static_cast<double>(k) / static_cast<double>(points - 1);
      best = std::max(best, std::fabs(b1 + t * b2) / std::sqrt(1.0 + 2.0 * alpha * t + t * t));
    }
    std::ostringstream where;
    where << "draw " << d << " (b1=" << format_double(b1) << ", b2=" << format_double(b2)
          << ", alpha=" << format_double(alpha) << ")";
    // Both the grid bound and the lower bound are folded into one defect.
    const double over = best - res.fs;
    const double under = std::max(std::fabs(b1), std::fabs(b2)) - kLowerSlack - res.fs;
    const double defect = under > 0.0 ? std::numeric_limits<double>::infinity() : std::max(over, 0.0);
    record(check, defect, where.str());
  }
}

}  // namespace

bool VerifyReport::all_passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
}

VerifyReport run_verify(const VerifyOptions& options) {
  if (!options.step) throw InvalidArgument("verify: no step function");
  Checks checks;
  VerifyReport report;

  for (std::size_t n : options.sizes) {
    if (n < 2) throw InvalidArgument("verify: sizes must be at least 2");
    const std::size_t block = std::max<std::size_t>(2, n / 5);
    for (std::size_t j = 0; j < options.systems_per_size; ++j) {
      const std::uint64_t seed = options.seed * 1000003u + n * 7919u + j;
      const LinearProblem p = gen_random_consistent(n, n, seed);
      check_system("random n=" + std::to_string(n) + " seed=" + std::to_string(seed), p, block,
                   options.sweeps_per_system, options.step, checks, report.step_events);
    }
  }
  if (options.include_tridiag) {
    check_system("tridiag n=100", gen_tridiag(100), 20, options.tridiag_sweeps, options.step, checks,
                 report.step_events);
  }
  check_two_vector(options, checks.maximality);

  report.checks = {checks.bookkeeping, checks.orthogonality, checks.pythagoras, checks.telescoping,
                   checks.monotone,    checks.equivalence,   checks.maximality};
  return report;
}

}  // namespace accproj

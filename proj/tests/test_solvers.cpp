#include <gtest/gtest.h>

#include <cmath>

#include "accproj/errors.hpp"
#include "accproj/problems.hpp"
#include "accproj/solvers.hpp"
#include "oracles.hpp"

using namespace accproj;

namespace {

using SolveFn = SolveReport (*)(const Matrix&, const Vector&, const SolverConfig&);

struct Named {
  const char* name;
  SolveFn fn;
};

const Named kSolvers[] = {{"sap", solve_sap}, {"msap1", solve_msap1}, {"msap2", solve_msap2}};

SolverConfig config(std::size_t bs, double tol = 1e-5) {
  SolverConfig c;
  c.block_size = bs;
  c.tol = tol;
  return c;
}

}  // namespace

TEST(Solvers, IdentityIsSolvedImmediately) {
  const Matrix a = Matrix::identity(10);
  Vector b(10);
  for (std::size_t i = 0; i < 10; ++i) b[i] = static_cast<double>(i) - 4.5;
  for (const Named& s : kSolvers) {
    const SolveReport r = s.fn(a, b, config(5, 1e-12));
    EXPECT_TRUE(r.converged) << s.name;
    EXPECT_LE(r.sweeps, 1u) << s.name;
    EXPECT_LE(oracle::rel_diff(r.solution, b), 1e-12) << s.name;
    EXPECT_EQ(r.solver, s.name);
  }
}

TEST(Solvers, TridiagConvergesWithCleanInvariants) {
  const LinearProblem p = gen_tridiag(100);
  for (const Named& s : kSolvers) {
    const SolveReport r = s.fn(p.a, p.b, config(20));
    EXPECT_TRUE(r.converged) << s.name;
    EXPECT_TRUE(r.invariant_log.empty()) << s.name << ": " << r.invariant_log.front().check;
    EXPECT_LE(r.residual_history.back(), 1e-5);
    EXPECT_EQ(r.residual_history.size(), r.sweeps + 1);
    EXPECT_EQ(r.pnorm_history.size(), r.sweeps + 1);
    for (std::size_t k = 1; k < r.pnorm_history.size(); ++k)
      EXPECT_GE(r.pnorm_history[k], r.pnorm_history[k - 1] * (1.0 - 1e-10)) << s.name << " sweep " << k;
    EXPECT_LE(std::fabs(r.c - dot(r.solution, r.solution)), 1e-8 * std::max(1.0, r.c));
    EXPECT_LE(oracle::rel_diff(r.solution, *p.x_exact), 1e-2);
    for (double pn : r.pnorm_history) EXPECT_LE(pn, norm2(*p.x_exact) + 1e-8);
  }
}

TEST(Solvers, AccelerationOrderingOnTridiag) {
  const LinearProblem p = gen_tridiag(100);
  const SolveReport sap = solve_sap(p.a, p.b, config(20));
  const SolveReport m1 = solve_msap1(p.a, p.b, config(20));
  const SolveReport m2 = solve_msap2(p.a, p.b, config(20));
  EXPECT_LT(m1.sweeps, sap.sweeps);
  EXPECT_LT(m2.sweeps, m1.sweeps);
  EXPECT_GT(m1.acceleration.two_vector, 0u);
  EXPECT_GT(m2.acceleration.window, 0u);
}

TEST(Solvers, AreDeterministic) {
  const LinearProblem p = gen_tridiag(60);
  for (const Named& s : kSolvers) {
    const SolveReport r1 = s.fn(p.a, p.b, config(12));
    const SolveReport r2 = s.fn(p.a, p.b, config(12));
    EXPECT_EQ(r1.sweeps, r2.sweeps);
    EXPECT_EQ(r1.solution, r2.solution);
    EXPECT_EQ(r1.residual_history, r2.residual_history);
  }
}

TEST(Solvers, NaiveKernelGivesSameCounts) {
  const LinearProblem p = gen_tridiag(60);
  for (const Named& s : kSolvers) {
    SolverConfig c = config(12);
    const SolveReport fast = s.fn(p.a, p.b, c);
    c.kernel = Kernel::naive;
    const SolveReport naive = s.fn(p.a, p.b, c);
    EXPECT_NEAR(static_cast<double>(naive.sweeps), static_cast<double>(fast.sweeps), 1.0) << s.name;
    EXPECT_LE(oracle::rel_diff(naive.solution, fast.solution), 1e-4) << s.name;
  }
}

TEST(Solvers, UnderdeterminedReachesMinimumNorm) {
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    const LinearProblem p = gen_random_consistent(30, 50, seed);
    const Vector xmin = oracle::min_norm_solution(p.a, p.b);
    for (const Named& s : {kSolvers[0], kSolvers[1]}) {
      const SolveReport r = s.fn(p.a, p.b, config(10, 1e-10));
      EXPECT_LE(oracle::rel_diff(r.solution, xmin), 1e-6) << s.name << " seed " << seed;
    }
  }
}

TEST(Solvers, NotConvergedCarriesReport) {
  const LinearProblem p = gen_tridiag(100);
  SolverConfig c = config(20);
  c.max_sweeps = 3;
  try {
    solve_sap(p.a, p.b, c);
    FAIL() << "expected NotConverged";
  } catch (const NotConverged& e) {
    EXPECT_FALSE(e.report().converged);
    EXPECT_EQ(e.report().sweeps, 3u);
    EXPECT_EQ(e.report().residual_history.size(), 4u);
    EXPECT_GT(e.report().residual_history.back(), 1e-5);
  }
}

TEST(Solvers, Msap1BeforeSweepVariant) {
  const LinearProblem p = gen_tridiag(100);
  SolverConfig c = config(20);
  c.msap1_variant = Msap1Variant::before_sweep;
  const SolveReport r = solve_msap1(p.a, p.b, c);
  EXPECT_TRUE(r.converged);
  EXPECT_TRUE(r.invariant_log.empty());
  EXPECT_LT(r.sweeps, solve_sap(p.a, p.b, config(20)).sweeps);
}

TEST(Solvers, Msap2KeepNewestAndSmallWindow) {
  const LinearProblem p = gen_tridiag(100);
  SolverConfig c = config(20);
  c.window_reset = WindowReset::keep_newest;
  EXPECT_TRUE(solve_msap2(p.a, p.b, c).converged);
  c = config(20);
  c.window = 2;
  const SolveReport r = solve_msap2(p.a, p.b, c);
  EXPECT_TRUE(r.converged);
  EXPECT_TRUE(r.invariant_log.empty());
}

TEST(Solvers, Msap2IllConditionedWindowFallsBack) {
  const LinearProblem p = gen_tridiag(100);
  SolverConfig c = config(20);
  c.cond_threshold = 1.5;  // every window counts as ill-conditioned
  const SolveReport r = solve_msap2(p.a, p.b, c);
  EXPECT_TRUE(r.converged);
  EXPECT_EQ(r.acceleration.window, 0u);
  EXPECT_GT(r.acceleration.ill_conditioned, 0u);
}

TEST(Solvers, RejectsBadConfig) {
  const LinearProblem p = gen_tridiag(20);
  SolverConfig c = config(5);
  c.tol = 0.0;
  EXPECT_THROW(solve_sap(p.a, p.b, c), InvalidArgument);
  c = config(5);
  c.window = 1;
  EXPECT_THROW(solve_msap2(p.a, p.b, c), InvalidArgument);
  c = config(5);
  c.cond_threshold = 0.5;
  EXPECT_THROW(solve_msap2(p.a, p.b, c), InvalidArgument);
  EXPECT_THROW(solve_sap(p.a, p.b, config(30)), InvalidArgument);
}

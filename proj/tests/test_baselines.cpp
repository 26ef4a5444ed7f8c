#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "accproj/baselines.hpp"
#include "accproj/errors.hpp"
#include "accproj/problems.hpp"
#include "oracles.hpp"

using namespace accproj;

TEST(Gmres, IdentityTakesOneStep) {
  const Vector b{1, -2, 3, 0.5};
  GmresConfig c;
  c.tol = 1e-12;
  const SolveReport r = solve_gmres(Matrix::identity(4), b, c);
  EXPECT_TRUE(r.converged);
  EXPECT_EQ(r.sweeps, 1u);
  EXPECT_EQ(r.inner, 1u);
  EXPECT_LE(oracle::rel_diff(r.solution, b), 1e-14);
}

TEST(Gmres, MatchesGaussianEliminationOnWellConditioned) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const LinearProblem p = gen_random_well_conditioned(40, seed);
    GmresConfig c;
    c.restart = 10;
    c.tol = 1e-12;
    const SolveReport r = solve_gmres(p.a, p.b, c);
    EXPECT_LE(oracle::rel_diff(r.solution, oracle::gauss_solve(p.a, p.b)), 1e-8);
  }
}

TEST(Gmres, FullRestartSolvesTridiagInNSteps) {
  const LinearProblem p = gen_tridiag(30);
  GmresConfig c;
  c.restart = 30;
  c.tol = 1e-10;
  const SolveReport r = solve_gmres(p.a, p.b, c);
  EXPECT_EQ(r.sweeps, 1u);
  EXPECT_LE(r.inner, 30u);
  EXPECT_LE(oracle::rel_diff(r.solution, *p.x_exact), 1e-8);
}

TEST(Gmres, ResidualEstimateIsNonincreasingWithinCycle) {
  const LinearProblem p = gen_tridiag(80);
  GmresConfig c;
  c.restart = 15;
  c.tol = 1e-6;
  c.max_outer = 5;
  SolveReport r;
  try {
    r = solve_gmres(p.a, p.b, c);
  } catch (const NotConverged& e) {
    r = e.report();
  }
  // History is [true, est x restart, true, est ..., ]; within each cycle the
  // least-squares estimates never grow.
  const std::size_t stride = c.restart + 1;
  for (std::size_t start = 0; start + stride < r.residual_history.size(); start += stride) {
    for (std::size_t k = start + 1; k < start + stride; ++k)
      EXPECT_LE(r.residual_history[k], r.residual_history[k - 1] * (1.0 + 1e-12));
  }
}

TEST(Gmres, RestartLimitRaisesNotConverged) {
  const LinearProblem p = gen_tridiag(100);
  GmresConfig c;
  c.restart = 2;
  c.max_outer = 3;
  EXPECT_THROW(solve_gmres(p.a, p.b, c), NotConverged);
}

TEST(Gmres, NonzeroStartingGuess) {
  const LinearProblem p = gen_random_well_conditioned(20, 9);
  GmresConfig c;
  c.tol = 1e-12;
  c.x0 = *p.x_exact;
  const SolveReport r = solve_gmres(p.a, p.b, c);
  EXPECT_EQ(r.sweeps, 0u);
  c.x0 = Vector(3);
  EXPECT_THROW(solve_gmres(p.a, p.b, c), InvalidArgument);
}

TEST(BlockJacobi, DiagonalWithUnitBlocksIsOneIteration) {
  const Matrix a{{2, 0, 0}, {0, 4, 0}, {0, 0, -1}};
  JacobiConfig c;
  c.block_size = 1;
  c.tol = 1e-14;
  const SolveReport r = solve_block_jacobi(a, Vector{2, 2, 3}, c);
  EXPECT_EQ(r.sweeps, 1u);
  EXPECT_LE(oracle::rel_diff(r.solution, Vector{1, 0.5, -3}), 1e-15);
}

TEST(BlockJacobi, WholeMatrixBlockIsOneIteration) {
  const LinearProblem p = gen_tridiag(50);
  JacobiConfig c;
  c.block_size = 50;
  c.tol = 1e-10;
  const SolveReport r = solve_block_jacobi(p.a, p.b, c);
  EXPECT_EQ(r.sweeps, 1u);
  EXPECT_LE(oracle::rel_diff(r.solution, *p.x_exact), 1e-12);
}

TEST(BlockJacobi, HandComputedSequence) {
  // A = [[2,1],[1,2]], b = (3,3): x_k = (1.5, 0.75, 1.125, ...) in both
  // coordinates, residuals halve every step.
  const Matrix a{{2, 1}, {1, 2}};
  JacobiConfig c;
  c.block_size = 1;
  c.tol = 0.2;
  const SolveReport r = solve_block_jacobi(a, Vector{3, 3}, c);
  ASSERT_EQ(r.residual_history.size(), 4u);
  EXPECT_DOUBLE_EQ(r.residual_history[0], 1.0);
  EXPECT_DOUBLE_EQ(r.residual_history[1], 0.5);
  EXPECT_DOUBLE_EQ(r.residual_history[2], 0.25);
  EXPECT_DOUBLE_EQ(r.residual_history[3], 0.125);
  EXPECT_EQ(r.solution, (Vector{1.125, 1.125}));
}

TEST(BlockJacobi, ShortLastBlock) {
  const LinearProblem p = gen_tridiag(25);
  JacobiConfig c;
  c.block_size = 10;
  c.tol = 1e-8;
  const SolveReport r = solve_block_jacobi(p.a, p.b, c);
  EXPECT_LE(oracle::rel_diff(r.solution, *p.x_exact), 1e-6);
  EXPECT_EQ(r.block_steps, 3 * r.sweeps);
}

TEST(BlockJacobi, Failures) {
  JacobiConfig c;
  c.block_size = 1;
  try {
    solve_block_jacobi(Matrix{{1, 1}, {1, 0}}, Vector{1, 1}, c);
    FAIL() << "expected SingularBlock";
  } catch (const SingularBlock& e) {
    EXPECT_EQ(e.block(), 1u);
  }
  EXPECT_THROW(solve_block_jacobi(Matrix{{1, 2}, {2, 1}}, Vector{1, 1}, c), Diverged);
  c.max_iters = 2;
  c.tol = 1e-12;
  EXPECT_THROW(solve_block_jacobi(Matrix{{2, 1}, {1, 2}}, Vector{3, 3}, c), NotConverged);
}

TEST(Direct, SolvesAndDetectsSingular) {
  EXPECT_LE(oracle::rel_diff(solve_direct(Matrix{{0, 1}, {1, 0}}, Vector{2, 3}), Vector{3, 2}), 1e-15);
  EXPECT_LE(oracle::rel_diff(solve_direct(Matrix{{4, 1}, {2, 3}}, Vector{9, 13}), Vector{1.4, 3.4}), 1e-15);
  EXPECT_THROW(solve_direct(Matrix{{1, 2}, {2, 4}}, Vector{1, 1}), Singular);
  EXPECT_THROW(solve_direct(Matrix{{1, 2}}, Vector{1}), InvalidArgument);
}

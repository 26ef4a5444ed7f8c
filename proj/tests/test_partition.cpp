#include <gtest/gtest.h>

#include <random>
#include <set>

#include "accproj/errors.hpp"
#include "accproj/partition.hpp"
#include "accproj/problems.hpp"
#include "oracles.hpp"

using namespace accproj;

namespace {

BlockPartition tridiag_partition(std::size_t n, std::size_t m, double overlap) {
  const LinearProblem p = gen_tridiag(n);
  return build_partition(p.a, p.b, BlockSpec{m, overlap, {}});
}

}  // namespace

TEST(Partition, OverlappedHalfStride) {
  const BlockPartition part = tridiag_partition(100, 20, 0.5);
  EXPECT_EQ(block_count(part), 10u);
  EXPECT_EQ(part[0].rows.front(), 0u);
  EXPECT_EQ(part[0].rows.back(), 19u);
  EXPECT_EQ(part[1].rows.front(), 10u);
  EXPECT_EQ(part[1].rows.back(), 29u);
  // The last block wraps around to the first rows.
  EXPECT_EQ(part[9].rows.front(), 90u);
  EXPECT_EQ(part[9].rows.back(), 9u);
}

TEST(Partition, DisjointBlocks) {
  const BlockPartition part = tridiag_partition(100, 20, 0.0);
  EXPECT_EQ(block_count(part), 5u);
  EXPECT_EQ(part[4].rows.front(), 80u);
  EXPECT_EQ(part[4].rows.back(), 99u);
}

TEST(Partition, BlockCountIsCeilRowsOverStride) {
  EXPECT_EQ(block_count(tridiag_partition(200, 50, 0.5)), 8u);
  EXPECT_EQ(block_count(tridiag_partition(101, 20, 0.5)), 11u);
}

TEST(Partition, CoverageAndExactBlockSize) {
  for (std::size_t rows : {7u, 20u, 33u, 64u}) {
    const LinearProblem p = gen_tridiag(rows);
    for (std::size_t m = 2; m <= rows; m += 3) {
      for (double overlap : {0.0, 0.25, 0.5, 0.75}) {
        const BlockSpec spec{m, overlap, {}};
        if (spec.stride() < 1) continue;
        const BlockPartition part = build_partition(p.a, p.b, spec);
        std::set<std::size_t> seen;
        for (const Block& blk : part.blocks()) {
          EXPECT_EQ(blk.rows.size(), m);
          seen.insert(blk.rows.begin(), blk.rows.end());
        }
        EXPECT_EQ(seen.size(), rows) << "rows=" << rows << " m=" << m << " overlap=" << overlap;
      }
    }
  }
}

TEST(Partition, CachedFactorsAreConsistent) {
  const BlockPartition part = tridiag_partition(100, 20, 0.5);
  for (const Block& blk : part.blocks()) {
    const Matrix qr = multiply(blk.q, blk.r);
    EXPECT_LE(oracle::max_abs_diff(qr, blk.a_rows.transpose()) / blk.a_rows.max_abs(), 1e-12);
    const Vector rt_bt = multiply_transposed(blk.r, blk.rhs_t);
    EXPECT_LE(norm2(rt_bt - blk.rhs), 1e-10 * std::max(norm2(blk.rhs), 1e-300));
  }
}

TEST(Partition, IsDeterministic) {
  std::mt19937_64 rng(9);
  const Matrix a = oracle::random_matrix(40, 40, rng);
  const Vector b = oracle::random_vector(40, rng);
  const BlockPartition p1 = build_partition(a, b, BlockSpec{8, 0.5, {}});
  const BlockPartition p2 = build_partition(a, b, BlockSpec{8, 0.5, {}});
  ASSERT_EQ(p1.size(), p2.size());
  for (std::size_t i = 0; i < p1.size(); ++i) {
    EXPECT_EQ(p1[i].rows, p2[i].rows);
    EXPECT_EQ(p1[i].q, p2[i].q);
    EXPECT_EQ(p1[i].r, p2[i].r);
    EXPECT_EQ(p1[i].rhs_t, p2[i].rhs_t);
  }
}

TEST(Partition, RowOrderPermutesBeforeGrouping) {
  const LinearProblem p = gen_tridiag(6);
  const BlockPartition part = build_partition(p.a, p.b, BlockSpec{2, 0.0, {5, 4, 3, 2, 1, 0}});
  EXPECT_EQ(part[0].rows, (std::vector<std::size_t>{5, 4}));
  EXPECT_THROW(build_partition(p.a, p.b, BlockSpec{2, 0.0, {0, 0, 1, 2, 3, 4}}), InvalidArgument);
}

TEST(Partition, RejectsBadSpecs) {
  const LinearProblem p = gen_tridiag(10);
  EXPECT_THROW(build_partition(p.a, p.b, BlockSpec{1, 0.5, {}}), InvalidArgument);
  EXPECT_THROW(build_partition(p.a, p.b, BlockSpec{11, 0.5, {}}), InvalidArgument);
  EXPECT_THROW(build_partition(p.a, p.b, BlockSpec{4, 1.0, {}}), InvalidArgument);
  EXPECT_THROW(build_partition(p.a, p.b, BlockSpec{4, -0.1, {}}), InvalidArgument);
  EXPECT_THROW(build_partition(p.a, Vector(9), BlockSpec{4, 0.5, {}}), InvalidArgument);
}

TEST(Partition, DependentRowsNameTheBlock) {
  Matrix a = Matrix::identity(6);
  for (std::size_t j = 0; j < 6; ++j) a(3, j) = a(2, j);  // rows 2 and 3 equal
  try {
    build_partition(a, Vector(6, 1.0), BlockSpec{2, 0.0, {}});
    FAIL() << "expected RankDeficientBlock";
  } catch (const RankDeficientBlock& e) {
    EXPECT_EQ(e.block(), 1u);
  }
}

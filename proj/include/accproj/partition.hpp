#pragma once

#include <cstddef>
#include <vector>

#include "accproj/linalg.hpp"

namespace accproj {

/// How the rows of A are grouped into blocks.
///
/// Blocks have exactly `block_size` rows and start every
/// round(block_size * (1 - overlap_fraction)) rows; the last block wraps
/// around to the first rows so that every row is covered.
struct BlockSpec {
  std::size_t block_size = 20;
  double overlap_fraction = 0.5;
  /// Optional row permutation applied before grouping; empty = natural order.
  std::vector<std::size_t> row_order;

  std::size_t stride() const;
  /// Throws InvalidArgument unless 2 <= block_size <= rows, the overlap is in
  /// [0, 1), the stride is at least 1 and row_order is a permutation.
  void validate(std::size_t rows) const;
};

/// One row group with its cached factors: A_i' = Q R and R' rhs_t = rhs.
struct Block {
  std::vector<std::size_t> rows;
  Matrix a_rows;  // A_i, block_size x n
  Matrix q;       // n x block_size
  Matrix r;       // block_size x block_size
  Vector rhs;     // b_i
  Vector rhs_t;   // (R')^{-1} b_i
};

class BlockPartition {
 public:
  BlockPartition(std::vector<Block> blocks, std::size_t rows, std::size_t cols)
      : blocks_(std::move(blocks)), rows_(rows), cols_(cols) {}

  const std::vector<Block>& blocks() const noexcept { return blocks_; }
  const Block& operator[](std::size_t i) const { return blocks_[i]; }
  std::size_t size() const noexcept { return blocks_.size(); }
  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

 private:
  std::vector<Block> blocks_;
  std::size_t rows_;
  std::size_t cols_;
};

/// Groups the rows of `a` and factors every block once. Throws
/// RankDeficientBlock(i) when block i has dependent rows.
BlockPartition build_partition(const Matrix& a, const Vector& b, const BlockSpec& spec);

inline std::size_t block_count(const BlockPartition& partition) { return partition.size(); }

}  // namespace accproj

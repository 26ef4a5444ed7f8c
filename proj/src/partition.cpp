#include "accproj/partition.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "accproj/errors.hpp"

namespace accproj {

std::size_t BlockSpec::stride() const {
  const double s = std::round(static_cast<double>(block_size) * (1.0 - overlap_fraction));
  return s < 1.0 ? 0 : static_cast<std::size_t>(s);
}

void BlockSpec::validate(std::size_t rows) const {
  if (block_size < 2) throw InvalidArgument("block size must be at least 2");
  if (block_size > rows) {
    throw InvalidArgument("block size " + std::to_string(block_size) + " exceeds row count " +
                          std::to_string(rows));
  }
  if (!(overlap_fraction >= 0.0 && overlap_fraction < 1.0)) {
    throw InvalidArgument("overlap fraction must lie in [0, 1)");
  }
  if (stride() < 1) throw InvalidArgument("overlap leaves a block stride below 1");
  if (!row_order.empty()) {
    if (row_order.size() != rows) throw InvalidArgument("row order length mismatch");
    std::vector<bool> seen(rows, false);
    for (std::size_t r : row_order) {
      if (r >= rows || seen[r]) throw InvalidArgument("row order is not a permutation");
      seen[r] = true;
    }
  }
}

BlockPartition build_partition(const Matrix& a, const Vector& b, const BlockSpec& spec) {
  const std::size_t rows = a.rows();
  const std::size_t n = a.cols();
  if (b.size() != rows) throw InvalidArgument("right-hand side length does not match row count");
  spec.validate(rows);

  const std::size_t m = spec.block_size;
  const std::size_t stride = spec.stride();
  const std::size_t k = (rows + stride - 1) / stride;
  if (m > n) {
    throw InvalidArgument("block size " + std::to_string(m) + " exceeds column count " +
                          std::to_string(n));
  }
  auto row_at = [&](std::size_t pos) { return spec.row_order.empty() ? pos : spec.row_order[pos]; };

  std::vector<Block> blocks;
  blocks.reserve(k);
  for (std::size_t i = 0; i < k; ++i) {
    Block blk;
    blk.rows.resize(m);
    blk.a_rows = Matrix(m, n);
    blk.rhs = Vector(m);
    for (std::size_t j = 0; j < m; ++j) {
      const std::size_t row = row_at((i * stride + j) % rows);
      blk.rows[j] = row;
      std::copy(a.row(row).begin(), a.row(row).end(), blk.a_rows.row(j).begin());
      blk.rhs[j] = b[row];
    }
    try {
      QRFactor f = householder_qr(blk.a_rows.transpose());
      blk.q = std::move(f.q);
      blk.r = std::move(f.r);
    } catch (const RankDeficient& e) {
      throw RankDeficientBlock(i, "block " + std::to_string(i) +
                                      " is rank deficient; change the block size or permute rows (" +
                                      e.what() + ")");
    }
    blk.rhs_t = forward_substitute_transposed(blk.r, blk.rhs);
    blocks.push_back(std::move(blk));
  }
  return BlockPartition(std::move(blocks), rows, n);
}

}  // namespace accproj

#pragma once

#include <span>
#include <string>
#include <vector>

#include "rpd/vec.hpp"

namespace rpd {

// Dense block row operator A = (A_1; ...; A_p) stored row-major. Block i
// owns rows [row_offset(i), row_offset(i) + block_dim(i)). Immutable after
// construction; safe to share across concurrent solver runs.
class BlockLinearOperator {
 public:
  BlockLinearOperator(int n, std::vector<int> block_dims, Vector matrix);

  // Whole-matrix constructor with a single block (p = 1).
  static BlockLinearOperator dense(int rows, int cols, Vector matrix);
  static BlockLinearOperator identity(int n);

  int n() const { return n_; }
  int m() const { return m_; }
  int p() const { return static_cast<int>(block_dims_.size()); }
  const std::vector<int>& block_dims() const { return block_dims_; }
  int block_dim(int i) const { return block_dims_[i - 1]; }
  int row_offset(int i) const { return row_offsets_[i - 1]; }
  double entry(int row, int col) const { return data_[row * n_ + col]; }
  const Vector& matrix() const { return data_; }

  // y = A x, length m.
  Vector apply(std::span<const double> x) const;
  // (A x)_i = A_i x, length m_i. Blocks are 1-based.
  Vector apply_block(int i, std::span<const double> x) const;
  // x = A^T y = sum_i A_i^T y_i, length n.
  Vector adjoint_apply(std::span<const double> y) const;

  BlockLinearOperator transposed() const;
  BlockLinearOperator scaled(double c) const;
  // Same matrix, rechunked into p equal row blocks.
  BlockLinearOperator with_blocks(int p) const;

  double frobenius_norm() const;

 private:
  int n_;
  int m_;
  std::vector<int> block_dims_;
  std::vector<int> row_offsets_;
  Vector data_;  // row-major m x n
};

// Largest singular value via power iteration on A^T A. Deterministic: starts
// from the normalized all-ones vector and, if that start lies in the null
// space of a nonzero A, restarts once from (1, 2, ..., n) normalized.
// Throws ConvergenceError (carrying the last estimate) if the relative
// change has not fallen below rel_tol within max_iters sweeps.
double spectral_norm(const BlockLinearOperator& a, double rel_tol = 1e-10,
                     int max_iters = 10000);

// JSON instance file schema:
//   {"n": ..., "block_dims": [...], "matrix": [row-major m*n doubles]}
BlockLinearOperator operator_from_json_text(const std::string& text);
std::string operator_to_json_text(const BlockLinearOperator& a);

}  // namespace rpd

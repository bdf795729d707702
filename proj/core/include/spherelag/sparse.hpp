#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace spherelag {

// Compressed sparse column matrix. Row indices are strictly increasing within
// each column and explicit zeros are never stored.
class SparseMatrix {
 public:
  using Entry = std::pair<std::size_t, double>;  // (row, value)

  SparseMatrix() = default;
  SparseMatrix(std::size_t rows, std::size_t cols, std::vector<std::size_t> col_ptr,
               std::vector<std::size_t> row_idx, std::vector<double> values);

  // Builds from per-column entry lists in any order. Zero values are dropped;
  // a repeated row within one column is an error.
  static SparseMatrix from_columns(std::size_t rows, std::vector<std::vector<Entry>> columns);
  static SparseMatrix identity(std::size_t n);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t nnz() const noexcept { return values_.size(); }

  std::span<const std::size_t> col_ptr() const noexcept { return col_ptr_; }
  std::span<const std::size_t> column_rows(std::size_t j) const;
  std::span<const double> column_values(std::size_t j) const;

  Eigen::MatrixXd to_dense() const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<std::size_t> col_ptr_{0};
  std::vector<std::size_t> row_idx_;
  std::vector<double> values_;
};

/// y = M v. Throws InvalidArgument on shape mismatch.
Eigen::VectorXd spmv(const SparseMatrix& m, const Eigen::VectorXd& v);

}  // namespace spherelag

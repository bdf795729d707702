#include "spherelag/sparse.hpp"

#include <algorithm>
#include <string>

#include "spherelag/error.hpp"

namespace spherelag {

SparseMatrix::SparseMatrix(std::size_t rows, std::size_t cols, std::vector<std::size_t> col_ptr,
                           std::vector<std::size_t> row_idx, std::vector<double> values)
    : rows_(rows),
      cols_(cols),
      col_ptr_(std::move(col_ptr)),
      row_idx_(std::move(row_idx)),
      values_(std::move(values)) {
  if (col_ptr_.size() != cols_ + 1 || col_ptr_.front() != 0 || col_ptr_.back() != values_.size() ||
      row_idx_.size() != values_.size()) {
    throw InvalidArgument("SparseMatrix: inconsistent compressed column arrays");
  }
  for (std::size_t j = 0; j < cols_; ++j) {
    if (col_ptr_[j] > col_ptr_[j + 1]) throw InvalidArgument("SparseMatrix: column pointers decrease");
    for (std::size_t k = col_ptr_[j]; k < col_ptr_[j + 1]; ++k) {
      if (row_idx_[k] >= rows_) throw InvalidArgument("SparseMatrix: row index out of range");
      if (k > col_ptr_[j] && row_idx_[k] <= row_idx_[k - 1]) {
        throw InvalidArgument("SparseMatrix: row indices not strictly increasing in column " +
                              std::to_string(j));
      }
      if (values_[k] == 0.0) throw InvalidArgument("SparseMatrix: explicit zero stored");
    }
  }
}

SparseMatrix SparseMatrix::from_columns(std::size_t rows, std::vector<std::vector<Entry>> columns) {
  std::vector<std::size_t> col_ptr{0};
  std::vector<std::size_t> row_idx;
  std::vector<double> values;
  col_ptr.reserve(columns.size() + 1);
  for (auto& col : columns) {
    std::sort(col.begin(), col.end(),
              [](const Entry& a, const Entry& b) { return a.first < b.first; });
    for (std::size_t k = 0; k < col.size(); ++k) {
      if (k > 0 && col[k].first == col[k - 1].first) {
        throw InvalidArgument("SparseMatrix: repeated row " + std::to_string(col[k].first));
      }
      if (col[k].second == 0.0) continue;
      row_idx.push_back(col[k].first);
      values.push_back(col[k].second);
    }
    col_ptr.push_back(values.size());
  }
  return SparseMatrix(rows, columns.size(), std::move(col_ptr), std::move(row_idx),
                      std::move(values));
}

SparseMatrix SparseMatrix::identity(std::size_t n) {
  std::vector<std::size_t> col_ptr(n + 1), row_idx(n);
  for (std::size_t i = 0; i <= n; ++i) col_ptr[i] = i;
  for (std::size_t i = 0; i < n; ++i) row_idx[i] = i;
  return SparseMatrix(n, n, std::move(col_ptr), std::move(row_idx), std::vector<double>(n, 1.0));
}

std::span<const std::size_t> SparseMatrix::column_rows(std::size_t j) const {
  return std::span<const std::size_t>(row_idx_).subspan(col_ptr_[j], col_ptr_[j + 1] - col_ptr_[j]);
}

std::span<const double> SparseMatrix::column_values(std::size_t j) const {
  return std::span<const double>(values_).subspan(col_ptr_[j], col_ptr_[j + 1] - col_ptr_[j]);
}

Eigen::MatrixXd SparseMatrix::to_dense() const {
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(rows_),
                                            static_cast<Eigen::Index>(cols_));
  for (std::size_t j = 0; j < cols_; ++j) {
    for (std::size_t k = col_ptr_[j]; k < col_ptr_[j + 1]; ++k) {
      d(static_cast<Eigen::Index>(row_idx_[k]), static_cast<Eigen::Index>(j)) = values_[k];
    }
  }
  return d;
}

Eigen::VectorXd spmv(const SparseMatrix& m, const Eigen::VectorXd& v) {
  if (static_cast<std::size_t>(v.size()) != m.cols()) {
    throw InvalidArgument("spmv: vector length " + std::to_string(v.size()) +
                          " does not match " + std::to_string(m.cols()) + " columns");
  }
  Eigen::VectorXd y = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m.rows()));
  for (std::size_t j = 0; j < m.cols(); ++j) {
    const double vj = v[static_cast<Eigen::Index>(j)];
    if (vj == 0.0) continue;
    const auto rows = m.column_rows(j);
    const auto vals = m.column_values(j);
    for (std::size_t k = 0; k < rows.size(); ++k) y[static_cast<Eigen::Index>(rows[k])] += vals[k] * vj;
  }
  return y;
}

}  // namespace spherelag

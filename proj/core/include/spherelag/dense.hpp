#pragma once

#include <cstddef>
#include <optional>
#include <utility>

#include <Eigen/Dense>

namespace spherelag {

// Bordered kernel collocation matrix
//
//   [ K    Phi ]
//   [ Phi^T  0 ]
//
// with K the n x n kernel block and Phi the n x p block of polynomial samples.
// K has a zero diagonal for the surface-spline kernels, so the system is
// factored as a whole by LU with partial pivoting rather than by block
// elimination. The factorization is computed once and reused.
class SaddleSystem {
 public:
  // Relative pivot threshold below which the system is reported singular.
  static constexpr double kPivotTolerance = 1e-14;

  SaddleSystem(std::size_t n, std::size_t p, Eigen::MatrixXd matrix);

  std::size_t n() const noexcept { return n_; }
  std::size_t p() const noexcept { return p_; }
  const Eigen::MatrixXd& matrix() const noexcept { return matrix_; }
  bool factored() const noexcept { return lu_.has_value(); }

  // Throws SingularSystem if any pivot falls below kPivotTolerance * ||M||_inf.
  void factor();

  // Factors on first use. rhs has n + p rows; any number of columns.
  Eigen::MatrixXd solve(const Eigen::MatrixXd& rhs);

 private:
  std::size_t n_;
  std::size_t p_;
  Eigen::MatrixXd matrix_;
  std::optional<Eigen::PartialPivLU<Eigen::MatrixXd>> lu_;
};

struct SaddleSolution {
  Eigen::VectorXd a;  // kernel coefficients, length n
  Eigen::VectorXd c;  // polynomial coefficients, length p
};

SaddleSolution factor_solve(SaddleSystem& system, const Eigen::VectorXd& rhs);

// Multiple right-hand sides; column j of the result pairs a.col(j) with c.col(j).
struct SaddleSolutions {
  Eigen::MatrixXd a;
  Eigen::MatrixXd c;
};

SaddleSolutions factor_solve(SaddleSystem& system, const Eigen::MatrixXd& rhs);

/// Smallest and largest eigenvalue of a dense symmetric matrix.
std::pair<double, double> sym_eig_minmax(const Eigen::MatrixXd& m);

}  // namespace spherelag

#include "spherelag/dense.hpp"

#include <cmath>
#include <string>

#include "spherelag/error.hpp"

namespace spherelag {

SaddleSystem::SaddleSystem(std::size_t n, std::size_t p, Eigen::MatrixXd matrix)
    : n_(n), p_(p), matrix_(std::move(matrix)) {
  const auto dim = static_cast<Eigen::Index>(n + p);
  if (matrix_.rows() != dim || matrix_.cols() != dim) {
    throw InvalidArgument("SaddleSystem: matrix must be (n+p) x (n+p)");
  }
}

void SaddleSystem::factor() {
  if (lu_) return;
  const double norm_inf = matrix_.cwiseAbs().rowwise().sum().maxCoeff();
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(matrix_);
  const double threshold = kPivotTolerance * norm_inf;
  const auto diag = lu.matrixLU().diagonal();
  for (Eigen::Index i = 0; i < diag.size(); ++i) {
    if (!(std::abs(diag[i]) > threshold)) {
      throw SingularSystem("saddle system is singular: pivot " + std::to_string(i) + " = " +
                           std::to_string(diag[i]) + " (threshold " + std::to_string(threshold) +
                           "); subset not unisolvent or nodes repeated");
    }
  }
  lu_ = std::move(lu);
}

Eigen::MatrixXd SaddleSystem::solve(const Eigen::MatrixXd& rhs) {
  if (rhs.rows() != matrix_.rows()) {
    throw InvalidArgument("SaddleSystem::solve: right-hand side has wrong length");
  }
  factor();
  return lu_->solve(rhs);
}

SaddleSolution factor_solve(SaddleSystem& system, const Eigen::VectorXd& rhs) {
  const Eigen::VectorXd sol = system.solve(rhs);
  const auto n = static_cast<Eigen::Index>(system.n());
  const auto p = static_cast<Eigen::Index>(system.p());
  return SaddleSolution{sol.head(n), sol.tail(p)};
}

SaddleSolutions factor_solve(SaddleSystem& system, const Eigen::MatrixXd& rhs) {
  Eigen::MatrixXd sol = system.solve(rhs);
  const auto n = static_cast<Eigen::Index>(system.n());
  const auto p = static_cast<Eigen::Index>(system.p());
  return SaddleSolutions{sol.topRows(n), sol.bottomRows(p)};
}

std::pair<double, double> sym_eig_minmax(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    throw InvalidArgument("sym_eig_minmax: matrix must be square and non-empty");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(m, Eigen::EigenvaluesOnly);
  if (eig.info() != Eigen::Success) throw Error("symmetric eigenvalue iteration did not converge");
  const auto& ev = eig.eigenvalues();  // ascending
  return {ev[0], ev[ev.size() - 1]};
}

}  // namespace spherelag

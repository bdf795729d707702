#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include <Eigen/Dense>

namespace spherelag {

// out = Op(in). `out` arrives sized to the operator's range.
using LinearOperator = std::function<void(const Eigen::VectorXd& in, Eigen::VectorXd& out)>;

struct GmresOptions {
  double tol = 1e-6;        // on ||b - A x||_2 / ||b||_2
  std::size_t maxit = 200;  // total Arnoldi steps
};

struct GmresReport {
  std::size_t iterations = 0;
  // Relative residual before the first step, then after every step.
  std::vector<double> residual_history;
  bool converged = false;
  bool breakdown = false;  // Krylov space became invariant (exact solution reached)
  double final_relres = 0.0;  // recomputed from the returned iterate
};

struct GmresResult {
  Eigen::VectorXd x;
  GmresReport report;
};

/// Full (non-restarted) GMRES with right preconditioning: minimizes the
/// residual of A P y = b - A x0 over the Krylov space and returns
/// x = x0 + P y. Pass an empty `precond` for P = I.
///
/// If the least-squares estimate claims convergence but the recomputed
/// residual does not, the iteration continues from the current iterate until
/// the budget is spent. A non-converged result carries the best iterate and
/// `converged == false`; it does not throw.
GmresResult gmres(const LinearOperator& apply_a, const LinearOperator& precond,
                  const Eigen::VectorXd& rhs, const Eigen::VectorXd& x0,
                  const GmresOptions& options = {});

}  // namespace spherelag

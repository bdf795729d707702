#include "spherelag/gmres.hpp"

#include <cmath>
#include <limits>

#include "spherelag/error.hpp"

namespace spherelag {
namespace {

struct Givens {
  double c = 1.0;
  double s = 0.0;
};

Givens make_givens(double a, double b) {
  if (b == 0.0) return {1.0, 0.0};
  const double r = std::hypot(a, b);
  return {a / r, b / r};
}

}  // namespace

GmresResult gmres(const LinearOperator& apply_a, const LinearOperator& precond,
                  const Eigen::VectorXd& rhs, const Eigen::VectorXd& x0,
                  const GmresOptions& options) {
  if (!(options.tol > 0.0)) throw InvalidArgument("gmres: tol must be positive");
  if (x0.size() != rhs.size()) throw InvalidArgument("gmres: x0 and rhs lengths differ");
  const Eigen::Index n = rhs.size();

  GmresResult result{x0, {}};
  GmresReport& report = result.report;

  const double bnorm = rhs.norm();
  if (bnorm == 0.0) {
    result.x.setZero();
    report.residual_history.push_back(0.0);
    report.converged = true;
    return result;
  }

  auto apply_p = [&](const Eigen::VectorXd& in, Eigen::VectorXd& out) {
    if (precond) {
      precond(in, out);
    } else {
      out = in;
    }
  };

  Eigen::VectorXd work(n), z(n);
  auto residual = [&](const Eigen::VectorXd& x) {
    apply_a(x, work);
    return Eigen::VectorXd(rhs - work);
  };

  Eigen::VectorXd r = residual(result.x);
  double relres = r.norm() / bnorm;
  report.residual_history.push_back(relres);
  if (relres <= options.tol) {
    report.converged = true;
    report.final_relres = relres;
    return result;
  }

  const std::size_t maxit = options.maxit;
  while (report.iterations < maxit) {
    // One Arnoldi cycle; normally the only one.
    const std::size_t budget = maxit - report.iterations;
    const double beta = r.norm();
    std::vector<Eigen::VectorXd> basis;
    basis.reserve(budget + 1);
    basis.emplace_back(r / beta);
    Eigen::MatrixXd hess = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(budget + 1),
                                                 static_cast<Eigen::Index>(budget));
    std::vector<Givens> rot;
    Eigen::VectorXd g = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(budget + 1));
    g[0] = beta;

    std::size_t k = 0;
    bool estimate_converged = false;
    for (; k < budget; ++k) {
      const auto kk = static_cast<Eigen::Index>(k);
      apply_p(basis[k], z);
      Eigen::VectorXd w(n);
      apply_a(z, w);
      const double wnorm0 = w.norm();
      // Modified Gram-Schmidt with one reorthogonalization pass.
      for (int pass = 0; pass < 2; ++pass) {
        for (std::size_t i = 0; i <= k; ++i) {
          const double hij = basis[i].dot(w);
          hess(static_cast<Eigen::Index>(i), kk) += hij;
          w -= hij * basis[i];
        }
      }
      const double hnext = w.norm();
      hess(kk + 1, kk) = hnext;

      for (std::size_t i = 0; i < k; ++i) {
        const auto ii = static_cast<Eigen::Index>(i);
        const double a = hess(ii, kk), b = hess(ii + 1, kk);
        hess(ii, kk) = rot[i].c * a + rot[i].s * b;
        hess(ii + 1, kk) = -rot[i].s * a + rot[i].c * b;
      }
      const Givens gk = make_givens(hess(kk, kk), hess(kk + 1, kk));
      rot.push_back(gk);
      hess(kk, kk) = gk.c * hess(kk, kk) + gk.s * hess(kk + 1, kk);
      hess(kk + 1, kk) = 0.0;
      g[kk + 1] = -gk.s * g[kk];
      g[kk] = gk.c * g[kk];

      ++report.iterations;
      relres = std::abs(g[kk + 1]) / bnorm;
      report.residual_history.push_back(relres);

      const bool happy = hnext <= 1e-14 * std::max(wnorm0, std::numeric_limits<double>::min());
      if (happy) report.breakdown = true;
      if (relres <= options.tol || happy) {
        estimate_converged = true;
        ++k;
        break;
      }
      basis.emplace_back(w / hnext);
    }

    // Back substitution on the rotated Hessenberg system.
    const auto m = static_cast<Eigen::Index>(k);
    Eigen::VectorXd y = hess.topLeftCorner(m, m).triangularView<Eigen::Upper>().solve(g.head(m));
    Eigen::VectorXd update = Eigen::VectorXd::Zero(n);
    for (Eigen::Index i = 0; i < m; ++i) update += y[i] * basis[static_cast<std::size_t>(i)];
    apply_p(update, z);
    result.x += z;

    r = residual(result.x);
    report.final_relres = r.norm() / bnorm;
    if (report.final_relres <= options.tol) {
      report.converged = true;
      return result;
    }
    // The recurrence drifted from the true residual; continue from the
    // corrected iterate while budget remains.
    if (!estimate_converged) break;
  }
  report.converged = false;
  return result;
}

}  // namespace spherelag

#include "spherelag/lagrange.hpp"

#include <algorithm>
#include <string>

#include "spherelag/error.hpp"
#include "spherelag/parallel.hpp"

namespace spherelag {
namespace {

void check_dense_cap(std::size_t n, std::size_t cap) {
  if (n > cap) {
    throw ResourceLimit("dense Lagrange solve refused: N = " + std::to_string(n) +
                        " exceeds the cap of " + std::to_string(cap));
  }
}

void check_constraint(const Eigen::MatrixXd& phi, const Eigen::VectorXd& a, const char* name) {
  const double scale = std::max(1.0, a.lpNorm<1>());
  const double viol = (phi.transpose() * a).lpNorm<Eigen::Infinity>();
  if (viol > 1e-8 * scale) {
    throw ConstraintViolation(std::string("native_inner: ") + name +
                              " is not in the constraint space (|Phi^T a| = " +
                              std::to_string(viol) + ")");
  }
}

}  // namespace

KernelExpansion LagrangeBasis::function(std::size_t center) const {
  const auto c = static_cast<Eigen::Index>(center);
  return KernelExpansion(spec, *source, A.col(c), C.col(c));
}

double LagrangeBasis::eval(std::size_t center, const SpherePoint& x) const {
  return function(center)(x);
}

LagrangeBasis full_lagrange(const NodeSet& set, const KernelSpec& spec, std::size_t dense_cap) {
  check_dense_cap(set.size(), dense_cap);
  SaddleSystem system = assemble_saddle(spec, set);
  const auto n = static_cast<Eigen::Index>(set.size());
  const auto p = static_cast<Eigen::Index>(spec.poly_dim());
  Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(n + p, n);
  rhs.topRows(n).setIdentity();
  auto sol = factor_solve(system, rhs);
  return LagrangeBasis{std::move(sol.a), std::move(sol.c), &set, spec};
}

SaddleSolution lagrange_column(const NodeSet& set, const KernelSpec& spec, std::size_t center,
                               std::size_t dense_cap) {
  check_dense_cap(set.size(), dense_cap);
  if (center >= set.size()) throw InvalidArgument("lagrange_column: center out of range");
  SaddleSystem system = assemble_saddle(spec, set);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(set.size() + spec.poly_dim()));
  rhs[static_cast<Eigen::Index>(center)] = 1.0;
  return factor_solve(system, rhs);
}

double native_inner(const NodeSet& set, const KernelSpec& spec, const Eigen::VectorXd& a1,
                    const Eigen::VectorXd& a2) {
  if (static_cast<std::size_t>(a1.size()) != set.size() ||
      static_cast<std::size_t>(a2.size()) != set.size()) {
    throw InvalidArgument("native_inner: coefficient vectors must have length N");
  }
  const Eigen::MatrixXd phi = spec.harmonics().sample(set);
  check_constraint(phi, a1, "first argument");
  check_constraint(phi, a2, "second argument");

  // a1^T K a2 with K applied row by row; K is never stored.
  const std::size_t n = set.size();
  std::vector<double> partial(n, 0.0);
  parallel_for(n, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const double ai = a1[static_cast<Eigen::Index>(i)];
      if (ai == 0.0) continue;
      double row = 0.0;
      for (std::size_t j = 0; j < n; ++j) row += spec(set[i].dot(set[j])) * a2[static_cast<Eigen::Index>(j)];
      partial[i] = ai * row;
    }
  });
  double s = 0.0;
  for (double v : partial) s += v;
  return s;
}

double constrained_min_eigenvalue(const NodeSet& set, const KernelSpec& spec) {
  const auto n = static_cast<Eigen::Index>(set.size());
  const auto p = static_cast<Eigen::Index>(spec.poly_dim());
  if (n <= p) throw InvalidArgument("constrained_min_eigenvalue: need more nodes than constraints");
  const Eigen::MatrixXd phi = spec.harmonics().sample(set);
  // The trailing n - p columns of a full QR of Phi span its orthogonal complement.
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(phi);
  const Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(n, n);
  const Eigen::MatrixXd z = q.rightCols(n - p);
  const Eigen::MatrixXd kz = kernel_matrix(spec, set) * z;
  Eigen::MatrixXd r = z.transpose() * kz;
  r = (0.5 * (r + r.transpose())).eval();
  return sym_eig_minmax(r).first;
}

Eigen::MatrixXd gram_discrete(const NodeSet& set, std::span<const std::size_t> indices,
                              const HarmonicBasis& basis) {
  if (indices.empty()) throw InvalidArgument("gram_discrete: empty index list");
  const Eigen::MatrixXd phi = basis.sample(set, indices);
  Eigen::MatrixXd g = phi.transpose() * phi;
  // Symmetric by construction; remove rounding asymmetry from the product.
  return 0.5 * (g + g.transpose());
}

double TruncatedFunction::eval(const NodeSet& set, const KernelSpec& spec,
                               const SpherePoint& x) const {
  double s = 0.0;
  for (std::size_t i = 0; i < support.size(); ++i) {
    s += A_tilde[static_cast<Eigen::Index>(i)] * spec(x.dot(set[support[i]]));
  }
  const Eigen::VectorXd phi = spec.harmonics().eval(x);
  return s + p.dot(phi);
}

TruncatedFunction truncate_project(const LagrangeBasis& basis, std::size_t center,
                                   std::span<const std::size_t> support) {
  const NodeSet& set = *basis.source;
  const std::size_t n = set.size();
  if (center >= n) throw InvalidArgument("truncate_project: center out of range");
  if (std::find(support.begin(), support.end(), center) == support.end()) {
    throw InvalidArgument("truncate_project: support must contain the center");
  }
  std::vector<char> inside(n, 0);
  for (std::size_t idx : support) {
    if (idx >= n) throw InvalidArgument("truncate_project: support index out of range");
    if (inside[idx]) throw InvalidArgument("truncate_project: repeated support index");
    inside[idx] = 1;
  }

  const HarmonicBasis harm = basis.spec.harmonics();
  const auto p = static_cast<Eigen::Index>(harm.size());
  const auto col = basis.A.col(static_cast<Eigen::Index>(center));

  // sigma_j: harmonic moments of the discarded coefficients.
  Eigen::VectorXd sigma = Eigen::VectorXd::Zero(p);
  for (std::size_t z = 0; z < n; ++z) {
    if (!inside[z]) sigma += col[static_cast<Eigen::Index>(z)] * harm.eval(set[z]);
  }

  const Eigen::MatrixXd gram = gram_discrete(set, support, harm);
  const auto [lmin, lmax] = sym_eig_minmax(gram);
  (void)lmax;
  if (!(lmin > kUnisolventGramFloor)) {
    throw NonUnisolventNeighborhood("truncate_project: support is not unisolvent (lambda_min(G) = " +
                                    std::to_string(lmin) + ")");
  }

  TruncatedFunction out;
  out.center = center;
  out.support.assign(support.begin(), support.end());
  out.tau = gram.ldlt().solve(sigma);
  const Eigen::MatrixXd phi = harm.sample(set, support);
  out.A_tilde.resize(static_cast<Eigen::Index>(support.size()));
  for (std::size_t i = 0; i < support.size(); ++i) {
    out.A_tilde[static_cast<Eigen::Index>(i)] = col[static_cast<Eigen::Index>(support[i])];
  }
  out.A_tilde += phi * out.tau;
  out.p = basis.C.col(static_cast<Eigen::Index>(center));
  return out;
}

}  // namespace spherelag

#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "spherelag/dense.hpp"
#include "spherelag/geom.hpp"
#include "spherelag/kernel.hpp"

namespace spherelag {

inline constexpr std::size_t kDefaultDenseCap = 20000;

// Full Lagrange basis of S_m(X): chi_xi = sum_zeta A(zeta, xi) k(., zeta) + sum_j C(j, xi) phi_j,
// with chi_xi(zeta) = delta and every column of A orthogonal to the harmonic
// samples. Holds a pointer to the node set, which must outlive it.
struct LagrangeBasis {
  Eigen::MatrixXd A;  // N x N, column xi
  Eigen::MatrixXd C;  // m^2 x N
  const NodeSet* source = nullptr;
  KernelSpec spec;

  std::size_t size() const noexcept { return static_cast<std::size_t>(A.cols()); }
  KernelExpansion function(std::size_t center) const;
  double eval(std::size_t center, const SpherePoint& x) const;
};

/// One factorization of the full bordered system, solved against all N
/// cardinal right-hand sides. Throws ResourceLimit above dense_cap nodes and
/// propagates SingularSystem.
LagrangeBasis full_lagrange(const NodeSet& set, const KernelSpec& spec,
                            std::size_t dense_cap = kDefaultDenseCap);

/// A single Lagrange function (one right-hand side).
SaddleSolution lagrange_column(const NodeSet& set, const KernelSpec& spec, std::size_t center,
                               std::size_t dense_cap = kDefaultDenseCap);

/// Native-space semi-inner product a1^T K a2 of two kernel-space functions
/// given by their kernel coefficients. Both vectors must satisfy
/// ||Phi^T a||_inf <= 1e-8 max(1, ||a||_1), otherwise ConstraintViolation.
double native_inner(const NodeSet& set, const KernelSpec& spec, const Eigen::VectorXd& a1,
                    const Eigen::VectorXd& a2);

/// theta = lambda_min of K restricted to the constraint space {a : Phi^T a = 0},
/// computed from an orthonormal basis of that space. Interpolation coefficients
/// then obey ||a||_2 <= ||f||_2 / theta. Dense; meant for small sets.
double constrained_min_eigenvalue(const NodeSet& set, const KernelSpec& spec);

/// G(k, j) = sum over the subset of phi_k(zeta) phi_j(zeta).
Eigen::MatrixXd gram_discrete(const NodeSet& set, std::span<const std::size_t> indices,
                              const HarmonicBasis& basis);

// Lagrange function truncated to a support set and realigned onto the
// constraint space; the polynomial part is inherited from the full function.
struct TruncatedFunction {
  std::size_t center = 0;
  std::vector<std::size_t> support;
  Eigen::VectorXd A_tilde;  // aligned with `support`
  Eigen::VectorXd p;        // m^2 polynomial coefficients
  Eigen::VectorXd tau;      // A_tilde - A|support = Phi|support * tau

  double eval(const NodeSet& set, const KernelSpec& spec, const SpherePoint& x) const;
};

// Smallest Gram eigenvalue accepted as unisolvent by truncate_project.
inline constexpr double kUnisolventGramFloor = 1e-13;

/// Restricts column `center` to `support` and adds the l2-smallest correction
/// in span{phi_j|support} that restores sum_support A_tilde phi_j = 0.
/// Throws NonUnisolventNeighborhood when lambda_min(G_support) <= 1e-13.
TruncatedFunction truncate_project(const LagrangeBasis& basis, std::size_t center,
                                   std::span<const std::size_t> support);

}  // namespace spherelag

#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "spherelag/dense.hpp"
#include "spherelag/geom.hpp"

namespace spherelag {

// Real spherical harmonics of degree <= max_degree, orthonormal in L2(S^2).
//
// Index layout is degree-major; within degree l the orders run
// 0, +1, -1, +2, -2, ..., so index l*l + 0 is the zonal function, index
// l*l + 2k - 1 the cos(k lon) function and l*l + 2k the sin(k lon) function.
// No Condon-Shortley phase: the degree-1 block is sqrt(3/4pi) * (z, x, y).
class HarmonicBasis {
 public:
  explicit HarmonicBasis(int max_degree);

  int max_degree() const noexcept { return max_degree_; }
  std::size_t size() const noexcept {
    return static_cast<std::size_t>((max_degree_ + 1) * (max_degree_ + 1));
  }
  static std::size_t index(int degree, int order);

  /// Writes all size() values at p into out.
  void eval(const SpherePoint& p, std::span<double> out) const;
  Eigen::VectorXd eval(const SpherePoint& p) const;

  /// Row i holds the basis values at set[subset[i]].
  Eigen::MatrixXd sample(const NodeSet& set, std::span<const std::size_t> subset) const;
  Eigen::MatrixXd sample(const NodeSet& set) const;

 private:
  int max_degree_;
  std::vector<double> norm_;  // sqrt((2l+1)/4pi (l-k)!/(l+k)!), with sqrt(2) for k > 0
};

// Restricted surface spline of order m:
//   k_m(a, b) = (-1)^m (1 - t)^(m-1) log(1 - t),  t = a.b,
// conditionally positive definite with respect to harmonics of degree <= m-1.
class KernelSpec {
 public:
  // Below this value of 1 - t the kernel returns its limit 0.
  static constexpr double kDiagonalCutoff = 1e-14;

  explicit KernelSpec(int m = 2);

  int m() const noexcept { return m_; }
  std::size_t poly_dim() const noexcept { return static_cast<std::size_t>(m_ * m_); }
  double sup_norm() const noexcept { return sup_norm_; }
  HarmonicBasis harmonics() const { return HarmonicBasis(m_ - 1); }

  double operator()(double t) const noexcept {
    const double u = 1.0 - t;
    if (u < kDiagonalCutoff) return 0.0;
    double p = 1.0;
    for (int i = 1; i < m_; ++i) p *= u;
    return sign_ * p * std::log(u);
  }

 private:
  int m_;
  double sign_;
  double sup_norm_;
};

double eval_kernel(const KernelSpec& spec, const SpherePoint& a, const SpherePoint& b) noexcept;

Eigen::VectorXd eval_harmonics(const HarmonicBasis& basis, const SpherePoint& p);

/// Kernel block K(i, j) = k(set[subset[i]], set[subset[j]]).
Eigen::MatrixXd kernel_matrix(const KernelSpec& spec, const NodeSet& set,
                              std::span<const std::size_t> subset);
Eigen::MatrixXd kernel_matrix(const KernelSpec& spec, const NodeSet& set);

/// The bordered collocation system on a subset of the nodes (n = #subset,
/// p = m^2). Exactly symmetric. Non-unisolvent subsets surface as
/// SingularSystem when the system is factored.
SaddleSystem assemble_saddle(const KernelSpec& spec, const NodeSet& set,
                             std::span<const std::size_t> subset);
SaddleSystem assemble_saddle(const KernelSpec& spec, const NodeSet& set);

// s(x) = sum_i a_i k(x, centers_i) + sum_j c_j phi_j(x).
class KernelExpansion {
 public:
  KernelExpansion(const KernelSpec& spec, const NodeSet& centers, Eigen::VectorXd a,
                  Eigen::VectorXd c);

  double operator()(const SpherePoint& x) const;
  Eigen::VectorXd eval(std::span<const SpherePoint> xs) const;

  const Eigen::VectorXd& a() const noexcept { return a_; }
  const Eigen::VectorXd& c() const noexcept { return c_; }

 private:
  KernelSpec spec_;
  HarmonicBasis basis_;
  const NodeSet* centers_;
  Eigen::VectorXd a_;
  Eigen::VectorXd c_;
};

/// Row-major evaluation matrix E(i, j) = k(xs[i], set[j]).
Eigen::MatrixXd kernel_eval_matrix(const KernelSpec& spec, const NodeSet& set,
                                   std::span<const SpherePoint> xs);

}  // namespace spherelag

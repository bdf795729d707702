#pragma once

// Independent reference implementations used to check the library. None of
// these call into the code under test beyond plain data types.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "spherelag/geom.hpp"

namespace oracle {

using spherelag::NodeSet;
using spherelag::SpherePoint;

double sq_chord(const SpherePoint& a, const SpherePoint& b);
double arc(const SpherePoint& a, const SpherePoint& b);  // acos of the clamped dot

/// Sorted by (squared chord, index).
std::vector<std::size_t> knn(const NodeSet& set, const SpherePoint& p, std::size_t k);
/// Linear scan of arc(center, x) <= r, sorted by (squared chord, index).
std::vector<std::size_t> ball(const NodeSet& set, const SpherePoint& center, double r);
/// Half the minimum pairwise arc length.
double separation(const NodeSet& set);

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, ascending.
std::vector<double> jacobi_eigenvalues(Eigen::MatrixXd a);

/// Gaussian elimination with partial pivoting on plain arrays.
Eigen::VectorXd lu_solve(const Eigen::MatrixXd& a, const Eigen::VectorXd& b);

/// Gauss-Legendre nodes and weights on [lo, hi].
std::pair<std::vector<double>, std::vector<double>> gauss_legendre(std::size_t n, double lo, double hi);

/// Integral over the polar cap of radius r (north pole center) by a product
/// Gauss rule in colatitude and longitude.
double cap_integral(const std::function<double(const SpherePoint&)>& f, double r, std::size_t n_theta = 64,
                    std::size_t n_phi = 64);

/// Real orthonormal harmonics up to degree 2 from closed-form polynomials,
/// in the library's documented order (0; 0, +1, -1; 0, +1, -1, +2, -2).
Eigen::VectorXd harmonics_closed_form(const SpherePoint& p, int max_degree);

/// sum over idx of phi(x) phi(x)^T by explicit double loop.
Eigen::MatrixXd naive_gram(const NodeSet& set, const std::vector<std::size_t>& idx, int max_degree);

/// (-1)^m (1 - t)^(m - 1) log(1 - t) straight from the formula with pow.
double kernel_formula(int m, double t);

/// Uniformly distributed random points (normalized Gaussian vectors).
NodeSet random_points(std::size_t n, std::uint64_t seed);
SpherePoint random_point(std::mt19937_64& rng);

}  // namespace oracle

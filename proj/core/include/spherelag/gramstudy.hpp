#pragma once

#include <cstddef>
#include <span>
#include <string>

#include <Eigen/Dense>

#include "spherelag/geom.hpp"

namespace spherelag {

// Gram matrix of the degree <= 1 real harmonics over the polar cap of radius r,
// ordered (l, k) = (0,0), (1,0), (1,1), (1,-1):
//   G00,00 = (1 - cos r) / 2
//   G00,10 = sqrt(3)/4 (1 - cos r)(1 + cos r)
//   G10,10 = (1 - cos r)(1 + cos r + cos^2 r) / 2
//   G1+-1  = (1 - cos r)^2 (2 + cos r) / 4
struct CapGramAnalytic {
  double r = 0.0;
  Eigen::Matrix4d G = Eigen::Matrix4d::Zero();

  /// G / mu(S_r); its entries are polynomials in cos r.
  Eigen::Matrix4d normalized() const;
  /// Smallest eigenvalue of G / mu(S_r).
  double lambda_min_normalized() const;
  /// lambda_min(G / mu) divided by its leading-order term r^4 / (256 pi).
  double asymptotic_ratio() const;
};

/// Requires 0 < r <= pi.
CapGramAnalytic cap_gram_analytic(double r);

enum class GramComparison { holds, violated, out_of_hypothesis };

struct GramCompareReport {
  std::size_t n_points = 0;
  double r = 0.0;
  double norm_inv_discrete = 0.0;  // ||G_C^{-1}||_2
  double bound = 0.0;              // mu(S_r) ||G_{S_r}^{-1}||_2
  double hc_over_r = 0.0;          // cap fill distance over radius (probe estimate)
  GramComparison status = GramComparison::holds;
};

std::string to_string(GramComparison c);

// Below this h_C / r the comparison inequality is expected to hold; larger
// values are reported as out of hypothesis rather than violations.
inline constexpr double kGramHypothesisRatio = 0.1;

/// Compares the discrete Gram inverse norm of the subset (all within the cap
/// B(cap_center, r)) with the continuous bound. Throws InvalidArgument for a
/// point outside the cap and NonUnisolventNeighborhood for a singular G_C.
GramCompareReport cap_gram_compare(const NodeSet& set, std::span<const std::size_t> indices,
                                   const SpherePoint& cap_center, double r,
                                   std::size_t probe_n = 20000);

/// Fibonacci-like points confined to the cap B(center, r), equal-area spacing.
NodeSet cap_fibonacci(const SpherePoint& center, double r, std::size_t n);

}  // namespace spherelag

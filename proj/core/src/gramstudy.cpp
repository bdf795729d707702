#include "spherelag/gramstudy.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "spherelag/dense.hpp"
#include "spherelag/error.hpp"
#include "spherelag/kernel.hpp"
#include "spherelag/lagrange.hpp"
#include "spherelag/neighbors.hpp"

namespace spherelag {
namespace {

// 1 - cos r without cancellation.
double one_minus_cos(double r) {
  const double s = std::sin(0.5 * r);
  return 2.0 * s * s;
}

}  // namespace

CapGramAnalytic cap_gram_analytic(double r) {
  if (!(r > 0.0 && r <= std::numbers::pi)) {
    throw InvalidArgument("cap_gram_analytic: radius must lie in (0, pi]");
  }
  const double s = one_minus_cos(r);
  const double c = 1.0 - s;
  CapGramAnalytic out;
  out.r = r;
  out.G(0, 0) = 0.5 * s;
  out.G(0, 1) = out.G(1, 0) = std::sqrt(3.0) / 4.0 * s * (1.0 + c);
  out.G(1, 1) = 0.5 * s * (1.0 + c + c * c);
  out.G(2, 2) = out.G(3, 3) = 0.25 * s * s * (2.0 + c);
  return out;
}

Eigen::Matrix4d CapGramAnalytic::normalized() const {
  // Divide out mu(S_r) = 2 pi (1 - cos r) symbolically.
  const double s = one_minus_cos(r);
  const double c = 1.0 - s;
  const double inv = 1.0 / (2.0 * std::numbers::pi);
  Eigen::Matrix4d n = Eigen::Matrix4d::Zero();
  n(0, 0) = 0.5 * inv;
  n(0, 1) = n(1, 0) = std::sqrt(3.0) / 4.0 * (1.0 + c) * inv;
  n(1, 1) = 0.5 * (1.0 + c + c * c) * inv;
  n(2, 2) = n(3, 3) = 0.25 * s * (2.0 + c) * inv;
  return n;
}

double CapGramAnalytic::lambda_min_normalized() const {
  return sym_eig_minmax(normalized()).first;
}

double CapGramAnalytic::asymptotic_ratio() const {
  const double leading = std::pow(r, 4) / (256.0 * std::numbers::pi);
  return lambda_min_normalized() / leading;
}

std::string to_string(GramComparison c) {
  switch (c) {
    case GramComparison::holds:
      return "holds";
    case GramComparison::violated:
      return "violated";
    case GramComparison::out_of_hypothesis:
      return "out_of_hypothesis";
  }
  return "unknown";
}

NodeSet cap_fibonacci(const SpherePoint& center, double r, std::size_t n) {
  if (n == 0) throw InvalidArgument("cap_fibonacci: need at least one point");
  const double golden_angle = std::numbers::pi * (3.0 - std::sqrt(5.0));
  const double s = one_minus_cos(r);
  const Frame frame = frame_with_pole(center);
  std::vector<SpherePoint> pts;
  pts.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    // Equal-area rings in 1 - z over [0, 1 - cos r].
    const double w = (static_cast<double>(i) + 0.5) / static_cast<double>(n) * s;
    const double z = 1.0 - w;
    const double rho = std::sqrt(std::max(0.0, w * (2.0 - w)));
    const double lon = golden_angle * static_cast<double>(i);
    const SpherePoint p = frame.to_world(rho * std::cos(lon), rho * std::sin(lon), z);
    pts.push_back(SpherePoint::normalized(p.x, p.y, p.z));
  }
  return NodeSet(std::move(pts));
}

GramCompareReport cap_gram_compare(const NodeSet& set, std::span<const std::size_t> indices,
                                   const SpherePoint& cap_center, double r, std::size_t probe_n) {
  if (indices.empty()) throw InvalidArgument("cap_gram_compare: empty point set");
  for (std::size_t idx : indices) {
    if (idx >= set.size()) throw InvalidArgument("cap_gram_compare: index out of range");
    if (geodesic_distance(cap_center, set[idx]) > r * (1.0 + 1e-12)) {
      throw InvalidArgument("cap_gram_compare: point " + std::to_string(idx) + " lies outside the cap");
    }
  }

  GramCompareReport rep;
  rep.n_points = indices.size();
  rep.r = r;

  const Eigen::MatrixXd gc = gram_discrete(set, indices, HarmonicBasis(1));
  const double lmin_c = sym_eig_minmax(gc).first;
  if (!(lmin_c > 0.0) || lmin_c < 1e-14 * gc.norm()) {
    throw NonUnisolventNeighborhood("cap_gram_compare: discrete Gram matrix is singular");
  }
  rep.norm_inv_discrete = 1.0 / lmin_c;

  const CapGramAnalytic analytic = cap_gram_analytic(r);
  rep.bound = 1.0 / analytic.lambda_min_normalized();

  // Fill distance of the subset within the cap, from probes inside the cap.
  std::vector<SpherePoint> sub;
  sub.reserve(indices.size());
  for (std::size_t idx : indices) sub.push_back(set[idx]);
  const NodeSet subset(std::move(sub));
  const NeighborIndex index(subset);
  const NodeSet probes = cap_fibonacci(cap_center, r, probe_n);
  double hc = 0.0;
  for (const auto& p : probes) {
    const auto [idx, chord] = index.nearest(p);
    hc = std::max(hc, geodesic_distance(p, subset[idx]));
  }
  rep.hc_over_r = hc / r;

  if (rep.norm_inv_discrete <= rep.bound) {
    rep.status = GramComparison::holds;
  } else {
    rep.status = rep.hc_over_r <= kGramHypothesisRatio ? GramComparison::violated
                                                       : GramComparison::out_of_hypothesis;
  }
  return rep;
}

}  // namespace spherelag

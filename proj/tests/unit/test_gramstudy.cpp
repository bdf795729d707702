#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <numeric>

#include "oracles.hpp"
#include "spherelag/error.hpp"
#include "spherelag/gramstudy.hpp"
#include "spherelag/lagrange.hpp"

using namespace spherelag;

namespace {

std::vector<std::size_t> iota(std::size_t n) {
  std::vector<std::size_t> v(n);
  std::iota(v.begin(), v.end(), 0);
  return v;
}

}  // namespace

TEST(CapGram, FullSphereIsIdentity) {
  const CapGramAnalytic g = cap_gram_analytic(std::numbers::pi);
  EXPECT_LE((g.G - Eigen::Matrix4d::Identity()).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_NEAR(g.lambda_min_normalized(), 1.0 / (4 * std::numbers::pi), 1e-15);
}

TEST(CapGram, EntriesMatchQuadrature) {
  const HarmonicBasis harm(1);
  for (double r : {0.05, 0.3, 1.0, 2.5}) {
    const CapGramAnalytic g = cap_gram_analytic(r);
    for (int i = 0; i < 4; ++i) {
      for (int j = 0; j < 4; ++j) {
        const double q = oracle::cap_integral(
            [&](const SpherePoint& p) {
              const Eigen::VectorXd v = harm.eval(p);
              return v[i] * v[j];
            },
            r);
        ASSERT_NEAR(g.G(i, j), q, 1e-10) << "r=" << r << " (" << i << "," << j << ")";
      }
    }
    const double mu = cap_area(r);
    EXPECT_LE((g.normalized() - g.G / mu).cwiseAbs().maxCoeff(), 1e-12 * g.normalized().norm());
  }
}

TEST(CapGram, DependsOnRadiusOnlyThroughCosine) {
  for (double r : {0.01, 0.7, 2.0, 3.0}) {
    const double c = std::cos(r);
    Eigen::Matrix4d want = Eigen::Matrix4d::Zero();
    want(0, 0) = (1 - c) / 2;
    want(0, 1) = want(1, 0) = std::sqrt(3.0) / 4 * (1 - c) * (1 + c);
    want(1, 1) = (1 - c) * (1 + c + c * c) / 2;
    want(2, 2) = want(3, 3) = (1 - c) * (1 - c) * (2 + c) / 4;
    EXPECT_LE((cap_gram_analytic(r).G - want).cwiseAbs().maxCoeff(), 1e-14) << r;
  }
}

TEST(CapGram, SmallRadiusAsymptotics) {
  for (double r : {0.05, 0.02, 0.01, 0.001}) {
    const double ratio = cap_gram_analytic(r).asymptotic_ratio();
    EXPECT_GE(ratio, 0.95) << r;
    EXPECT_LE(ratio, 1.05) << r;
  }
  EXPECT_NEAR(cap_gram_analytic(0.05).asymptotic_ratio(), 1.000521, 5e-6);
  EXPECT_NEAR(cap_gram_analytic(0.01).asymptotic_ratio(), 1.000021, 5e-6);
  // Eigenvalue from an independent Jacobi sweep.
  const auto ev = oracle::jacobi_eigenvalues(cap_gram_analytic(0.3).normalized());
  EXPECT_NEAR(cap_gram_analytic(0.3).lambda_min_normalized(), *std::min_element(ev.begin(), ev.end()), 1e-14);
}

TEST(CapGram, RejectsBadRadius) {
  EXPECT_THROW(cap_gram_analytic(0.0), InvalidArgument);
  EXPECT_THROW(cap_gram_analytic(-0.1), InvalidArgument);
  EXPECT_THROW(cap_gram_analytic(3.2), InvalidArgument);
  EXPECT_THROW(cap_gram_analytic(std::nan("")), InvalidArgument);
}

TEST(CapFibonacci, InsideCapAndSpread) {
  const SpherePoint c = SpherePoint::from_lonlat(1.0, 0.4);
  const NodeSet s = cap_fibonacci(c, 0.2, 500);
  ASSERT_EQ(s.size(), 500u);
  for (const auto& p : s) ASSERT_LE(geodesic_distance(p, c), 0.2 + 1e-12);
  EXPECT_GT(oracle::separation(s), 0.0);
  EXPECT_THROW(cap_fibonacci(c, 0.2, 0), InvalidArgument);
}

TEST(CapCompare, BoundHoldsOnDenseCap) {
  const SpherePoint c = SpherePoint::from_lonlat(-0.5, 0.9);
  const double r = 0.05;
  const NodeSet s = cap_fibonacci(c, r, 2000);
  const auto idx = iota(s.size());
  const GramCompareReport rep = cap_gram_compare(s, idx, c, r);
  EXPECT_EQ(rep.n_points, 2000u);
  EXPECT_EQ(rep.status, GramComparison::holds);
  EXPECT_LE(rep.norm_inv_discrete, rep.bound);
  EXPECT_LT(rep.hc_over_r, kGramHypothesisRatio);
  EXPECT_NEAR(rep.bound * cap_gram_analytic(r).lambda_min_normalized(), 1.0, 1e-12);
  const Eigen::MatrixXd g = gram_discrete(s, idx, HarmonicBasis(1));
  const auto ev = oracle::jacobi_eigenvalues(g);
  EXPECT_NEAR(rep.norm_inv_discrete * *std::min_element(ev.begin(), ev.end()), 1.0, 1e-8);
}

TEST(CapCompare, FullSphereMatchesAverage) {
  const NodeSet s = gen_fibonacci(3000);
  const auto idx = iota(s.size());
  const GramCompareReport rep = cap_gram_compare(s, idx, SpherePoint{0, 0, 1}, std::numbers::pi, 5000);
  const double expected = 4.0 * std::numbers::pi / 3000.0;
  EXPECT_NEAR(rep.norm_inv_discrete / expected, 1.0, 0.2);
  EXPECT_EQ(rep.status, GramComparison::holds);
}

TEST(CapCompare, SparseCapIsNotReportedAsViolation) {
  const SpherePoint c{0, 0, 1};
  const double r = 0.01;
  std::vector<SpherePoint> pts{c};
  for (int k = 0; k < 3; ++k) pts.push_back(SpherePoint::from_lonlat(2.1 * k, std::numbers::pi / 2 - 0.008));
  const NodeSet s(pts);
  const GramCompareReport rep = cap_gram_compare(s, iota(4), c, r);
  EXPECT_GT(rep.hc_over_r, kGramHypothesisRatio);
  EXPECT_NE(rep.status, GramComparison::violated);
  EXPECT_FALSE(to_string(rep.status).empty());
}

TEST(CapCompare, Errors) {
  const SpherePoint c{0, 0, 1};
  const NodeSet s = cap_fibonacci(c, 0.1, 50);
  EXPECT_THROW(cap_gram_compare(s, std::vector<std::size_t>{}, c, 0.1), InvalidArgument);
  EXPECT_THROW(cap_gram_compare(s, std::vector<std::size_t>{0, 50}, c, 0.1), InvalidArgument);
  EXPECT_THROW(cap_gram_compare(s, iota(50), c, 0.05), InvalidArgument);
  // Two points cannot resolve four harmonics.
  EXPECT_THROW(cap_gram_compare(s, std::vector<std::size_t>{0, 1}, c, 0.1), NonUnisolventNeighborhood);
  EXPECT_EQ(to_string(GramComparison::holds), "holds");
  EXPECT_EQ(to_string(GramComparison::violated), "violated");
  EXPECT_EQ(to_string(GramComparison::out_of_hypothesis), "out_of_hypothesis");
}

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "spherelag/error.hpp"
#include "spherelag/kernel.hpp"

using namespace spherelag;

TEST(KernelSpecTest, Basics) {
  const KernelSpec k2(2), k3(3);
  EXPECT_EQ(k2.poly_dim(), 4u);
  EXPECT_EQ(k3.poly_dim(), 9u);
  EXPECT_EQ(KernelSpec().m(), 2);
  EXPECT_THROW(KernelSpec(1), InvalidArgument);
}

TEST(KernelSpecTest, PointValues) {
  const KernelSpec k2(2), k3(3);
  EXPECT_EQ(k2(1.0), 0.0);
  EXPECT_EQ(k3(1.0), 0.0);
  EXPECT_NEAR(k2(-1.0), 2.0 * std::log(2.0), 1e-15);
  EXPECT_NEAR(k2(-1.0), 1.3862944, 1e-7);
  EXPECT_EQ(k2(0.0), 0.0);
  EXPECT_NEAR(k3(0.5), 0.25 * std::log(2.0), 1e-15);
  EXPECT_NEAR(k3(0.5), 0.1732868, 1e-7);
}

TEST(KernelSpecTest, MatchesFormulaAcrossRange) {
  for (int m = 2; m <= 5; ++m) {
    const KernelSpec k(m);
    for (double t = -1.0; t < 0.999; t += 0.0137) {
      ASSERT_NEAR(k(t), oracle::kernel_formula(m, t), 1e-14 * (1 + std::abs(k(t)))) << m << " " << t;
    }
  }
}

TEST(KernelSpecTest, ContinuousAtDiagonal) {
  const KernelSpec k(2);
  const SpherePoint a{0, 0, 1};
  for (double d : {1e-6, 1e-7, 1e-9, 1e-12}) {
    const SpherePoint b{std::sin(d), 0, std::cos(d)};
    EXPECT_LE(std::abs(eval_kernel(k, a, b)), 1e-10) << d;
  }
}

TEST(KernelSpecTest, SupNormAnalytic) {
  // |(1-t)^(m-1) log(1-t)| is largest at t = -1: 2^(m-1) log 2.
  for (int m = 2; m <= 6; ++m) {
    EXPECT_NEAR(KernelSpec(m).sup_norm(), std::pow(2.0, m - 1) * std::log(2.0), 1e-9) << m;
  }
}

TEST(KernelSpecTest, SymmetricExactly) {
  std::mt19937_64 rng(1);
  const KernelSpec k(2);
  for (int i = 0; i < 1000; ++i) {
    const SpherePoint a = oracle::random_point(rng), b = oracle::random_point(rng);
    ASSERT_EQ(eval_kernel(k, a, b), eval_kernel(k, b, a));
  }
}

TEST(Harmonics, IndexLayout) {
  EXPECT_EQ(HarmonicBasis::index(0, 0), 0u);
  EXPECT_EQ(HarmonicBasis::index(1, 0), 1u);
  EXPECT_EQ(HarmonicBasis::index(1, 1), 2u);
  EXPECT_EQ(HarmonicBasis::index(1, -1), 3u);
  EXPECT_EQ(HarmonicBasis::index(2, -2), 8u);
  EXPECT_THROW(HarmonicBasis::index(1, 2), InvalidArgument);
  EXPECT_THROW(HarmonicBasis(-1), InvalidArgument);
}

TEST(Harmonics, ConstantAndPole) {
  const HarmonicBasis b(1);
  const Eigen::VectorXd v = b.eval(SpherePoint{0, 0, 1});
  EXPECT_NEAR(v[0], 1.0 / std::sqrt(4 * std::numbers::pi), 1e-15);
  EXPECT_NEAR(v[0], 0.2820948, 1e-7);
  EXPECT_NEAR(v[1], std::sqrt(3.0 / (4 * std::numbers::pi)), 1e-15);
  EXPECT_NEAR(v[2], 0.0, 1e-15);
  EXPECT_NEAR(v[3], 0.0, 1e-15);
}

TEST(Harmonics, MatchClosedForms) {
  std::mt19937_64 rng(2);
  const HarmonicBasis b(2);
  for (int i = 0; i < 500; ++i) {
    const SpherePoint p = oracle::random_point(rng);
    ASSERT_LE((b.eval(p) - oracle::harmonics_closed_form(p, 2)).cwiseAbs().maxCoeff(), 1e-14);
  }
}

TEST(Harmonics, AdditionTheorem) {
  std::mt19937_64 rng(3);
  const HarmonicBasis b(4);
  for (int i = 0; i < 200; ++i) {
    const Eigen::VectorXd v = b.eval(oracle::random_point(rng));
    for (int l = 0; l <= 4; ++l) {
      double s = 0;
      for (int k = -l; k <= l; ++k) s += std::pow(v[static_cast<Eigen::Index>(HarmonicBasis::index(l, k))], 2);
      ASSERT_NEAR(s, (2 * l + 1) / (4 * std::numbers::pi), 1e-13);
    }
  }
}

TEST(Harmonics, OrthonormalByQuadrature) {
  const HarmonicBasis b(3);
  const std::size_t d = b.size();
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = i; j < d; ++j) {
      const double v = oracle::cap_integral(
          [&](const SpherePoint& p) {
            const Eigen::VectorXd e = b.eval(p);
            return e[static_cast<Eigen::Index>(i)] * e[static_cast<Eigen::Index>(j)];
          },
          std::numbers::pi, 24, 24);
      EXPECT_NEAR(v, i == j ? 1.0 : 0.0, 1e-8) << i << "," << j;
    }
  }
}

TEST(Harmonics, SampleRows) {
  const NodeSet s = gen_fibonacci(10);
  const HarmonicBasis b(1);
  const std::vector<std::size_t> sub{7, 2};
  const Eigen::MatrixXd m = b.sample(s, sub);
  ASSERT_EQ(m.rows(), 2);
  EXPECT_EQ(m.row(0).transpose(), b.eval(s[7]));
  EXPECT_EQ(m.row(1).transpose(), b.eval(s[2]));
  EXPECT_EQ(b.sample(s).rows(), 10);
}

TEST(Saddle, AssemblyStructure) {
  const NodeSet s = gen_fibonacci(30);
  const KernelSpec k(2);
  SaddleSystem sys = assemble_saddle(k, s);
  const Eigen::MatrixXd& m = sys.matrix();
  ASSERT_EQ(m.rows(), 34);
  EXPECT_EQ(m, m.transpose());
  EXPECT_EQ(m.bottomRightCorner(4, 4), Eigen::MatrixXd::Zero(4, 4));
  for (Eigen::Index i = 0; i < 30; ++i) EXPECT_EQ(m(i, i), 0.0);
  EXPECT_EQ(m(3, 5), eval_kernel(k, s[3], s[5]));
  EXPECT_EQ(m.block(0, 30, 30, 4), k.harmonics().sample(s));
}

TEST(Saddle, SinglePointIsFiveByFiveAndSingular) {
  const NodeSet s = gen_fibonacci(10);
  const std::vector<std::size_t> one{4};
  SaddleSystem sys = assemble_saddle(KernelSpec(2), s, one);
  ASSERT_EQ(sys.matrix().rows(), 5);
  EXPECT_EQ(sys.matrix()(0, 0), 0.0);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(5);
  rhs[0] = 1;
  EXPECT_THROW(factor_solve(sys, rhs), SingularSystem);
}

TEST(KernelMatrixTest, SubsetAndEvalMatrix) {
  const NodeSet s = gen_fibonacci(40);
  const KernelSpec k(2);
  const std::vector<std::size_t> sub{1, 5, 9};
  const Eigen::MatrixXd km = kernel_matrix(k, s, sub);
  EXPECT_EQ(km(0, 2), eval_kernel(k, s[1], s[9]));
  const auto probes = probe_points(7);
  const Eigen::MatrixXd e = kernel_eval_matrix(k, s, probes);
  ASSERT_EQ(e.rows(), 7);
  ASSERT_EQ(e.cols(), 40);
  EXPECT_EQ(e(6, 39), eval_kernel(k, probes[6], s[39]));
}

TEST(Expansion, EvaluatesSum) {
  const NodeSet s = gen_fibonacci(20);
  const KernelSpec k(2);
  Eigen::VectorXd a = Eigen::VectorXd::LinSpaced(20, -1, 1), c(4);
  c << 0.5, -0.25, 1.0, 2.0;
  const KernelExpansion f(k, s, a, c);
  const SpherePoint x = SpherePoint::from_lonlat(0.7, 0.1);
  double ref = 0;
  for (std::size_t i = 0; i < 20; ++i) ref += a[static_cast<Eigen::Index>(i)] * oracle::kernel_formula(2, x.dot(s[i]));
  ref += c.dot(oracle::harmonics_closed_form(x, 1));
  EXPECT_NEAR(f(x), ref, 1e-13);
  const std::vector<SpherePoint> xs{x, x};
  EXPECT_EQ(f.eval(xs)[1], f(x));
  EXPECT_THROW(KernelExpansion(k, s, Eigen::VectorXd::Zero(3), c), InvalidArgument);
}

#include <gtest/gtest.h>

#include <algorithm>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "spherelag/error.hpp"
#include "spherelag/neighbors.hpp"

using namespace spherelag;

TEST(NeighborIndex, SinglePoint) {
  const NodeSet s({SpherePoint{0, 0, 1}});
  const NeighborIndex idx(s);
  EXPECT_EQ(idx.knn(0, 1), std::vector<std::size_t>{0});
  EXPECT_EQ(idx.knn(SpherePoint{1, 0, 0}, 1), std::vector<std::size_t>{0});
  EXPECT_EQ(idx.ball(SpherePoint{0, 0, -1}, std::numbers::pi), std::vector<std::size_t>{0});
  EXPECT_EQ(idx.nearest(SpherePoint{0, 1, 0}).first, 0u);
}

TEST(NeighborIndex, KnnArgumentErrors) {
  const NodeSet s = gen_fibonacci(20);
  const NeighborIndex idx(s);
  EXPECT_THROW(idx.knn(0, 0), InvalidArgument);
  EXPECT_THROW(idx.knn(0, 21), InvalidArgument);
  EXPECT_THROW(idx.knn(20, 1), InvalidArgument);
}

TEST(NeighborIndex, KnnSelfFirstAndFullPermutation) {
  const NodeSet s = gen_fibonacci(300);
  const NeighborIndex idx(s);
  EXPECT_EQ(idx.knn(17, 1), std::vector<std::size_t>{17});
  auto all = idx.knn(17, s.size());
  EXPECT_EQ(all.front(), 17u);
  std::sort(all.begin(), all.end());
  for (std::size_t i = 0; i < all.size(); ++i) ASSERT_EQ(all[i], i);
}

TEST(NeighborIndex, IcosahedronSixNearest) {
  const NodeSet s = gen_icosahedral(0);
  const NeighborIndex idx(s);
  for (std::size_t c = 0; c < s.size(); ++c) {
    const auto nn = idx.knn(c, 6);
    EXPECT_EQ(nn[0], c);
    const double edge = std::acos(1.0 / std::sqrt(5.0));
    for (std::size_t k = 1; k < 6; ++k) EXPECT_NEAR(geodesic_distance(s[c], s[nn[k]]), edge, 1e-12);
    EXPECT_EQ(nn, oracle::knn(s, s[c], 6));
  }
}

TEST(NeighborIndex, ExactTiesBrokenByIndex) {
  // The four equatorial axis points are exactly equidistant from the pole.
  const NodeSet s({SpherePoint{0, -1, 0}, SpherePoint{1, 0, 0}, SpherePoint{0, 0, 1}, SpherePoint{-1, 0, 0},
                   SpherePoint{0, 1, 0}, SpherePoint{0, 0, -1}});
  const NeighborIndex idx(s);
  EXPECT_EQ(idx.knn(2, 5), (std::vector<std::size_t>{2, 0, 1, 3, 4}));
  EXPECT_EQ(idx.knn(2, 3), (std::vector<std::size_t>{2, 0, 1}));
  EXPECT_EQ(idx.ball(SpherePoint{0, 0, 1}, 1.6), (std::vector<std::size_t>{2, 0, 1, 3, 4}));
}

TEST(NeighborIndex, Icosahedral2562Stencils) {
  const NodeSet s = gen_icosahedral(4);
  const NeighborIndex idx(s);
  for (std::size_t c = 0; c < s.size(); ++c) {
    const auto nn = idx.knn(c, 84);
    ASSERT_EQ(nn.size(), 84u);
    ASSERT_EQ(nn[0], c);
  }
}

TEST(NeighborIndex, KnnMatchesBruteForce) {
  const NodeSet s = oracle::random_points(1000, 11);
  const NeighborIndex idx(s);
  std::mt19937_64 rng(5);
  for (std::size_t k : {1u, 10u, 50u}) {
    for (std::size_t c = 0; c < s.size(); c += 7) {
      ASSERT_EQ(idx.knn(c, k), oracle::knn(s, s[c], k)) << "center " << c << " k " << k;
    }
    for (int t = 0; t < 50; ++t) {
      const SpherePoint p = oracle::random_point(rng);
      ASSERT_EQ(idx.knn(p, k), oracle::knn(s, p, k));
    }
  }
}

TEST(NeighborIndex, BallMatchesBruteForce) {
  const NodeSet s = oracle::random_points(2000, 12);
  const NeighborIndex idx(s);
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> rr(0.01, 2.0);
  for (int t = 0; t < 200; ++t) {
    const SpherePoint c = oracle::random_point(rng);
    const double r = rr(rng);
    ASSERT_EQ(idx.ball(c, r), oracle::ball(s, c, r));
  }
}

TEST(NeighborIndex, BallEdgeCases) {
  const NodeSet s = gen_fibonacci(400);
  const NeighborIndex idx(s);
  EXPECT_EQ(idx.ball(s[3], std::numbers::pi).size(), s.size());
  const double q = oracle::separation(s);
  EXPECT_EQ(idx.ball(s[3], 0.99 * q), std::vector<std::size_t>{3});
}

TEST(NeighborIndex, NearestMatchesBruteForce) {
  const NodeSet s = oracle::random_points(500, 13);
  const NeighborIndex idx(s);
  std::mt19937_64 rng(7);
  for (int t = 0; t < 300; ++t) {
    const SpherePoint p = oracle::random_point(rng);
    const auto [i, chord] = idx.nearest(p);
    EXPECT_EQ(i, oracle::knn(s, p, 1)[0]);
    EXPECT_NEAR(chord, std::sqrt(oracle::sq_chord(p, s[i])), 1e-15);
  }
}

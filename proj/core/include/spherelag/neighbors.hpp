#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "spherelag/geom.hpp"

namespace spherelag {

// kd-tree over the R^3 embedding of a node set. Chordal distance is a monotone
// function of geodesic distance, so nearest-neighbour and ball queries in R^3
// give the geodesic answer. Neighbours at equal distance are ordered by index.
//
// The index keeps a pointer to the source set; the set must outlive it.
class NeighborIndex {
 public:
  static constexpr std::size_t kLeafSize = 16;

  explicit NeighborIndex(const NodeSet& set);

  const NodeSet& source() const noexcept { return *set_; }
  std::size_t size() const noexcept { return set_->size(); }

  /// The k nearest nodes to node `center_idx`, nearest first; the center itself
  /// is always first. Throws InvalidArgument unless 1 <= k <= N.
  std::vector<std::size_t> knn(std::size_t center_idx, std::size_t k) const;

  /// The k nearest nodes to an arbitrary point on the sphere.
  std::vector<std::size_t> knn(const SpherePoint& p, std::size_t k) const;

  /// All nodes within geodesic distance r of `center`, nearest first.
  std::vector<std::size_t> ball(const SpherePoint& center, double r) const;

  /// Index and chordal distance of the node nearest to p.
  std::pair<std::size_t, double> nearest(const SpherePoint& p) const;

 private:
  struct Node {
    // Leaf when axis < 0: points order_[begin, end).
    std::int32_t axis = -1;
    double split = 0.0;
    std::uint32_t begin = 0;
    std::uint32_t end = 0;
    std::uint32_t left = 0;
    std::uint32_t right = 0;
  };

  std::uint32_t build(std::uint32_t begin, std::uint32_t end);
  double coord(std::size_t idx, int axis) const;

  const NodeSet* set_;
  std::vector<std::uint32_t> order_;
  std::vector<Node> nodes_;
  std::uint32_t root_ = 0;
};

}  // namespace spherelag

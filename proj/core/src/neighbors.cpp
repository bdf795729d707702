#include "spherelag/neighbors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <queue>
#include <utility>

#include "spherelag/error.hpp"

namespace spherelag {
namespace {

struct Candidate {
  double d2;
  std::size_t idx;
  bool operator<(const Candidate& o) const noexcept {
    return d2 < o.d2 || (d2 == o.d2 && idx < o.idx);
  }
};

double sq_chord(const SpherePoint& a, const SpherePoint& b) noexcept {
  const double dx = a.x - b.x, dy = a.y - b.y, dz = a.z - b.z;
  return dx * dx + dy * dy + dz * dz;
}

double axis_value(const SpherePoint& p, int axis) noexcept {
  return axis == 0 ? p.x : (axis == 1 ? p.y : p.z);
}

}  // namespace

NeighborIndex::NeighborIndex(const NodeSet& set) : set_(&set) {
  if (set.empty()) throw InvalidArgument("cannot index an empty node set");
  order_.resize(set.size());
  for (std::size_t i = 0; i < order_.size(); ++i) order_[i] = static_cast<std::uint32_t>(i);
  nodes_.reserve(2 * (set.size() / kLeafSize + 1));
  root_ = build(0, static_cast<std::uint32_t>(order_.size()));
}

double NeighborIndex::coord(std::size_t idx, int axis) const {
  return axis_value((*set_)[idx], axis);
}

std::uint32_t NeighborIndex::build(std::uint32_t begin, std::uint32_t end) {
  const auto id = static_cast<std::uint32_t>(nodes_.size());
  nodes_.push_back(Node{-1, 0.0, begin, end, 0, 0});
  if (end - begin <= kLeafSize) return id;

  // Split along the axis of largest extent at the median point.
  double lo[3] = {2, 2, 2}, hi[3] = {-2, -2, -2};
  for (std::uint32_t i = begin; i < end; ++i) {
    for (int a = 0; a < 3; ++a) {
      const double v = coord(order_[i], a);
      lo[a] = std::min(lo[a], v);
      hi[a] = std::max(hi[a], v);
    }
  }
  int axis = 0;
  for (int a = 1; a < 3; ++a) {
    if (hi[a] - lo[a] > hi[axis] - lo[axis]) axis = a;
  }
  const std::uint32_t mid = begin + (end - begin) / 2;
  std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                   [&](std::uint32_t a, std::uint32_t b) {
                     const double va = coord(a, axis), vb = coord(b, axis);
                     return va < vb || (va == vb && a < b);
                   });
  const double split = coord(order_[mid], axis);
  const std::uint32_t left = build(begin, mid);
  const std::uint32_t right = build(mid, end);
  nodes_[id] = Node{axis, split, begin, end, left, right};
  return id;
}

std::vector<std::size_t> NeighborIndex::knn(const SpherePoint& p, std::size_t k) const {
  if (k == 0 || k > size()) {
    throw InvalidArgument("knn: k must lie in [1, " + std::to_string(size()) + "], got " +
                          std::to_string(k));
  }
  std::priority_queue<Candidate> heap;  // max-heap: worst candidate on top
  auto visit = [&](auto&& self, std::uint32_t node_id) -> void {
    const Node& node = nodes_[node_id];
    if (node.axis < 0) {
      for (std::uint32_t i = node.begin; i < node.end; ++i) {
        const Candidate c{sq_chord(p, (*set_)[order_[i]]), order_[i]};
        if (heap.size() < k) {
          heap.push(c);
        } else if (c < heap.top()) {
          heap.pop();
          heap.push(c);
        }
      }
      return;
    }
    const double diff = axis_value(p, node.axis) - node.split;
    const std::uint32_t near = diff < 0 ? node.left : node.right;
    const std::uint32_t far = diff < 0 ? node.right : node.left;
    self(self, near);
    if (heap.size() < k || diff * diff <= heap.top().d2) self(self, far);
  };
  visit(visit, root_);

  std::vector<Candidate> found;
  found.reserve(heap.size());
  while (!heap.empty()) {
    found.push_back(heap.top());
    heap.pop();
  }
  std::reverse(found.begin(), found.end());
  std::vector<std::size_t> out;
  out.reserve(found.size());
  for (const auto& c : found) out.push_back(c.idx);
  return out;
}

std::vector<std::size_t> NeighborIndex::knn(std::size_t center_idx, std::size_t k) const {
  if (center_idx >= size()) throw InvalidArgument("knn: center index out of range");
  auto out = knn((*set_)[center_idx], k);
  // Distinct nodes make the center the unique zero-distance hit; enforce it anyway.
  auto it = std::find(out.begin(), out.end(), center_idx);
  if (it == out.end()) {
    out.pop_back();
    out.insert(out.begin(), center_idx);
  } else if (it != out.begin()) {
    std::rotate(out.begin(), it, it + 1);
  }
  return out;
}

std::pair<std::size_t, double> NeighborIndex::nearest(const SpherePoint& p) const {
  const auto idx = knn(p, 1).front();
  return {idx, std::sqrt(sq_chord(p, (*set_)[idx]))};
}

std::vector<std::size_t> NeighborIndex::ball(const SpherePoint& center, double r) const {
  std::vector<Candidate> hits;
  if (r >= std::numbers::pi) {
    hits.reserve(size());
    for (std::size_t i = 0; i < size(); ++i) hits.push_back({sq_chord(center, (*set_)[i]), i});
  } else if (r >= 0.0) {
    // Slightly widened chordal filter, then the exact geodesic test.
    const double chord = chord_from_geodesic(r) * (1.0 + 1e-12) + 1e-15;
    const double c2 = chord * chord;
    auto visit = [&](auto&& self, std::uint32_t node_id) -> void {
      const Node& node = nodes_[node_id];
      if (node.axis < 0) {
        for (std::uint32_t i = node.begin; i < node.end; ++i) {
          const std::size_t idx = order_[i];
          const double d2 = sq_chord(center, (*set_)[idx]);
          if (d2 <= c2 && geodesic_distance(center, (*set_)[idx]) <= r) hits.push_back({d2, idx});
        }
        return;
      }
      const double diff = axis_value(center, node.axis) - node.split;
      const std::uint32_t near = diff < 0 ? node.left : node.right;
      const std::uint32_t far = diff < 0 ? node.right : node.left;
      self(self, near);
      if (diff * diff <= c2) self(self, far);
    };
    visit(visit, root_);
  }
  std::sort(hits.begin(), hits.end());
  std::vector<std::size_t> out;
  out.reserve(hits.size());
  for (const auto& c : hits) out.push_back(c.idx);
  return out;
}

}  // namespace spherelag

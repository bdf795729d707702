#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

namespace spherelag {

// A point on the unit sphere S^2 embedded in R^3.
struct SpherePoint {
  double x = 0.0;
  double y = 0.0;
  double z = 1.0;

  // Scales (x, y, z) to unit length. Throws InvalidArgument for the zero vector
  // or non-finite input.
  static SpherePoint normalized(double x, double y, double z);

  // Longitude in [-pi, pi], latitude in [-pi/2, pi/2], both radians.
  static SpherePoint from_lonlat(double lon, double lat);

  double dot(const SpherePoint& o) const noexcept { return x * o.x + y * o.y + z * o.z; }

  friend bool operator==(const SpherePoint&, const SpherePoint&) = default;
};

struct MeshStats {
  double h = 0.0;    // mesh norm (fill distance), radians, probe estimate
  double q = 0.0;    // separation radius, radians, exact
  double rho = 0.0;  // h / q
  std::size_t n_probe = 0;
};

// Ordered set of distinct nodes. The index of a point is its identity.
class NodeSet {
 public:
  NodeSet() = default;
  explicit NodeSet(std::vector<SpherePoint> points) : points_(std::move(points)) {}

  std::size_t size() const noexcept { return points_.size(); }
  bool empty() const noexcept { return points_.empty(); }
  const SpherePoint& operator[](std::size_t i) const { return points_[i]; }
  std::span<const SpherePoint> points() const noexcept { return points_; }
  auto begin() const noexcept { return points_.begin(); }
  auto end() const noexcept { return points_.end(); }

  const std::optional<MeshStats>& stats() const noexcept { return stats_; }
  void set_stats(const MeshStats& s) { stats_ = s; }

 private:
  std::vector<SpherePoint> points_;
  std::optional<MeshStats> stats_;
};

/// Great-circle distance in [0, pi], computed as atan2(|a x b|, a.b) so that
/// small and near-antipodal separations keep full relative accuracy.
double geodesic_distance(const SpherePoint& a, const SpherePoint& b) noexcept;

/// Euclidean distance in R^3; monotone in the geodesic distance d via 2 sin(d/2).
double chordal_distance(const SpherePoint& a, const SpherePoint& b) noexcept;
double chord_from_geodesic(double d) noexcept;

/// Area 2 pi (1 - cos r) of a spherical cap of geodesic radius r in [0, pi].
double cap_area(double r);

// Hard cap on the icosahedral refinement level; level 9 already has 2.6M nodes.
inline constexpr int kMaxIcosahedralLevel = 9;

/// Icosahedral node set with 10 * 4^level + 2 points. The twelve base vertices
/// come first (vertex 0 is the north pole, vertex 11 the south pole), then the
/// edge midpoints of each refinement pass in face traversal order.
NodeSet gen_icosahedral(int level, int max_level = kMaxIcosahedralLevel);

/// Spherical Fibonacci lattice: z_i = 1 - (2i + 1)/n, longitude i * golden angle.
NodeSet gen_fibonacci(std::size_t n);

/// Low-discrepancy probe points used for sup-norm and mesh-norm estimates.
/// The sequence is nested: probe_points(n) is a prefix of probe_points(n + k).
std::vector<SpherePoint> probe_points(std::size_t n);

struct LoadedNodes {
  NodeSet nodes;
  std::size_t normalized_rows = 0;  // rows that were not unit length on input
};

/// Reads a node file: one "x y z" row per line, '#' comments and blank lines
/// ignored. Non-unit rows are normalized and counted. Throws ParseError with the
/// offending line number, or DuplicatePoints naming both lines.
LoadedNodes load_nodes(const std::filesystem::path& path);
void save_nodes(const NodeSet& set, const std::filesystem::path& path);

std::size_t default_probe_count(std::size_t n_nodes);

/// Separation radius from nearest-neighbour search (exact) and mesh norm from
/// the nearest node to each of probe_n probe points (a lower bound on the true
/// value that tightens as probe_n grows).
MeshStats mesh_stats(const NodeSet& set, std::size_t probe_n);
MeshStats mesh_stats(const NodeSet& set);

/// Rotation taking the north pole (0, 0, 1) to `center`. Columns are the
/// images of the x, y and z axes.
struct Frame {
  SpherePoint ex, ey, ez;
  SpherePoint to_world(double x, double y, double z) const noexcept;
};
Frame frame_with_pole(const SpherePoint& center);

}  // namespace spherelag

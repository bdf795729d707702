#include "spherelag/geom.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <tuple>

#include "spherelag/error.hpp"
#include "spherelag/neighbors.hpp"
#include "spherelag/parallel.hpp"

namespace spherelag {

SpherePoint SpherePoint::normalized(double x, double y, double z) {
  const double n = std::sqrt(x * x + y * y + z * z);
  if (!(n > 0.0) || !std::isfinite(n)) {
    throw InvalidArgument("cannot normalize a zero or non-finite vector");
  }
  return SpherePoint{x / n, y / n, z / n};
}

SpherePoint SpherePoint::from_lonlat(double lon, double lat) {
  const double c = std::cos(lat);
  return SpherePoint{c * std::cos(lon), c * std::sin(lon), std::sin(lat)};
}

double geodesic_distance(const SpherePoint& a, const SpherePoint& b) noexcept {
  const double cx = a.y * b.z - a.z * b.y;
  const double cy = a.z * b.x - a.x * b.z;
  const double cz = a.x * b.y - a.y * b.x;
  return std::atan2(std::sqrt(cx * cx + cy * cy + cz * cz), a.dot(b));
}

double chordal_distance(const SpherePoint& a, const SpherePoint& b) noexcept {
  const double dx = a.x - b.x, dy = a.y - b.y, dz = a.z - b.z;
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

double chord_from_geodesic(double d) noexcept { return 2.0 * std::sin(0.5 * d); }

double cap_area(double r) {
  if (!(r >= 0.0 && r <= std::numbers::pi)) {
    throw InvalidArgument("cap_area: radius must lie in [0, pi]");
  }
  return 2.0 * std::numbers::pi * (1.0 - std::cos(r));
}

NodeSet gen_icosahedral(int level, int max_level) {
  if (level < 0) throw InvalidArgument("gen_icosahedral: level must be >= 0");
  if (level > max_level) {
    throw ResourceLimit("gen_icosahedral: level " + std::to_string(level) +
                        " exceeds the configured cap " + std::to_string(max_level));
  }
  using std::numbers::pi;
  std::vector<SpherePoint> pts;
  pts.reserve(10 * (std::size_t{1} << (2 * level)) + 2);

  // Pole-aligned icosahedron: two rings of five at latitude +-atan(1/2).
  const double ring_lat = std::atan(0.5);
  pts.push_back({0.0, 0.0, 1.0});
  for (int k = 0; k < 5; ++k) pts.push_back(SpherePoint::from_lonlat(2.0 * pi * k / 5.0, ring_lat));
  for (int k = 0; k < 5; ++k) {
    pts.push_back(SpherePoint::from_lonlat(2.0 * pi * k / 5.0 + pi / 5.0, -ring_lat));
  }
  pts.push_back({0.0, 0.0, -1.0});

  using Face = std::array<std::uint32_t, 3>;
  std::vector<Face> faces;
  for (std::uint32_t k = 0; k < 5; ++k) {
    const std::uint32_t u0 = 1 + k, u1 = 1 + (k + 1) % 5;
    const std::uint32_t l0 = 6 + k, l1 = 6 + (k + 1) % 5;
    faces.push_back({0, u0, u1});
    faces.push_back({u0, l0, u1});
    faces.push_back({u1, l0, l1});
    faces.push_back({11, l1, l0});
  }

  for (int pass = 0; pass < level; ++pass) {
    std::map<std::pair<std::uint32_t, std::uint32_t>, std::uint32_t> midpoint;
    auto mid = [&](std::uint32_t a, std::uint32_t b) {
      const auto key = std::minmax(a, b);
      auto [it, inserted] = midpoint.try_emplace({key.first, key.second}, 0u);
      if (inserted) {
        const auto& p = pts[a];
        const auto& q = pts[b];
        it->second = static_cast<std::uint32_t>(pts.size());
        pts.push_back(SpherePoint::normalized(p.x + q.x, p.y + q.y, p.z + q.z));
      }
      return it->second;
    };
    std::vector<Face> refined;
    refined.reserve(4 * faces.size());
    for (const auto& f : faces) {
      const auto ab = mid(f[0], f[1]);
      const auto bc = mid(f[1], f[2]);
      const auto ca = mid(f[2], f[0]);
      refined.push_back({f[0], ab, ca});
      refined.push_back({ab, f[1], bc});
      refined.push_back({ca, bc, f[2]});
      refined.push_back({ab, bc, ca});
    }
    faces = std::move(refined);
  }
  return NodeSet(std::move(pts));
}

NodeSet gen_fibonacci(std::size_t n) {
  if (n < 2) throw InvalidArgument("gen_fibonacci: need at least 2 points");
  const double golden_angle = std::numbers::pi * (3.0 - std::sqrt(5.0));
  std::vector<SpherePoint> pts;
  pts.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double z = 1.0 - (2.0 * static_cast<double>(i) + 1.0) / static_cast<double>(n);
    const double s = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double lon = golden_angle * static_cast<double>(i);
    pts.push_back(SpherePoint::normalized(s * std::cos(lon), s * std::sin(lon), z));
  }
  return NodeSet(std::move(pts));
}

std::vector<SpherePoint> probe_points(std::size_t n) {
  // Two-dimensional Kronecker sequence with the plastic-number increments,
  // mapped to the sphere by the area-preserving (z, longitude) chart.
  constexpr double plastic = 1.32471795724474602596;
  constexpr double a1 = 1.0 / plastic;
  constexpr double a2 = 1.0 / (plastic * plastic);
  std::vector<SpherePoint> pts;
  pts.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double k = static_cast<double>(i);
    const double u = std::fmod(0.5 + a1 * k, 1.0);
    const double v = std::fmod(0.5 + a2 * k, 1.0);
    const double z = 1.0 - 2.0 * u;
    const double s = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double lon = 2.0 * std::numbers::pi * v;
    pts.push_back(SpherePoint::normalized(s * std::cos(lon), s * std::sin(lon), z));
  }
  return pts;
}

namespace {

bool parse_double(std::string_view tok, double& out) {
  const char* first = tok.data();
  const char* last = tok.data() + tok.size();
  if (first != last && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

}  // namespace

LoadedNodes load_nodes(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open node file " + path.string());

  LoadedNodes result;
  std::vector<SpherePoint> pts;
  std::vector<std::size_t> line_of;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;

    std::istringstream fields(line);
    std::string tok;
    double v[3];
    int count = 0;
    while (fields >> tok) {
      if (count == 3) throw ParseError(path.string(), lineno, "expected 3 values, found more");
      if (!parse_double(tok, v[count])) {
        throw ParseError(path.string(), lineno, "not a number: '" + tok + "'");
      }
      ++count;
    }
    if (count != 3) {
      throw ParseError(path.string(), lineno, "expected 3 values, found " + std::to_string(count));
    }
    const double norm = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
    if (!(norm > 0.0) || !std::isfinite(norm)) {
      throw ParseError(path.string(), lineno, "zero or non-finite point");
    }
    if (std::abs(norm - 1.0) > 1e-12) {
      ++result.normalized_rows;
      pts.push_back(SpherePoint::normalized(v[0], v[1], v[2]));
    } else {
      pts.push_back({v[0], v[1], v[2]});
    }
    line_of.push_back(lineno);
  }

  std::vector<std::size_t> order(pts.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  auto key = [&](std::size_t i) { return std::tie(pts[i].x, pts[i].y, pts[i].z); };
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return key(a) < key(b) || (key(a) == key(b) && a < b);
  });
  for (std::size_t i = 1; i < order.size(); ++i) {
    if (pts[order[i]] == pts[order[i - 1]]) {
      throw DuplicatePoints(line_of[order[i - 1]], line_of[order[i]]);
    }
  }

  result.nodes = NodeSet(std::move(pts));
  return result;
}

void save_nodes(const NodeSet& set, const std::filesystem::path& path) {
  std::FILE* f = std::fopen(path.string().c_str(), "w");
  if (!f) throw Error("cannot write node file " + path.string());
  std::fprintf(f, "# spherelag nodes N=%zu\n", set.size());
  for (const auto& p : set) std::fprintf(f, "%.17g %.17g %.17g\n", p.x, p.y, p.z);
  if (std::fclose(f) != 0) throw Error("error writing node file " + path.string());
}

std::size_t default_probe_count(std::size_t n_nodes) {
  return std::max<std::size_t>(100 * n_nodes, 100000);
}

MeshStats mesh_stats(const NodeSet& set, std::size_t probe_n) {
  if (set.size() < 2) throw InvalidArgument("mesh_stats: need at least 2 nodes");
  if (probe_n < set.size()) throw InvalidArgument("mesh_stats: probe_n must be at least N");
  const NeighborIndex index(set);

  std::vector<double> nearest_other(set.size());
  parallel_for(set.size(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const auto nn = index.knn(i, 2);
      nearest_other[i] = geodesic_distance(set[i], set[nn[1]]);
    }
  });
  const double q = 0.5 * *std::min_element(nearest_other.begin(), nearest_other.end());

  const auto probes = probe_points(probe_n);
  std::vector<double> probe_dist(probes.size());
  parallel_for(probes.size(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const auto [idx, chord] = index.nearest(probes[i]);
      probe_dist[i] = geodesic_distance(probes[i], set[idx]);
    }
  });
  const double h =
      probe_dist.empty() ? 0.0 : *std::max_element(probe_dist.begin(), probe_dist.end());

  return MeshStats{h, q, h / q, probe_n};
}

MeshStats mesh_stats(const NodeSet& set) {
  return mesh_stats(set, default_probe_count(set.size()));
}

SpherePoint Frame::to_world(double x, double y, double z) const noexcept {
  return SpherePoint{x * ex.x + y * ey.x + z * ez.x, x * ex.y + y * ey.y + z * ez.y,
                     x * ex.z + y * ey.z + z * ez.z};
}

Frame frame_with_pole(const SpherePoint& center) {
  // Any unit vector orthogonal to the center serves as the local x axis.
  const SpherePoint helper = std::abs(center.z) < 0.9 ? SpherePoint{0, 0, 1} : SpherePoint{1, 0, 0};
  const double d = helper.dot(center);
  const SpherePoint ex = SpherePoint::normalized(helper.x - d * center.x, helper.y - d * center.y,
                                                 helper.z - d * center.z);
  const SpherePoint ey{center.y * ex.z - center.z * ex.y, center.z * ex.x - center.x * ex.z,
                       center.x * ex.y - center.y * ex.x};
  return Frame{ex, ey, center};
}

}  // namespace spherelag

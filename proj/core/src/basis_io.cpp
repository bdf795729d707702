#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>

#include "spherelag/error.hpp"
#include "spherelag/locallag.hpp"

namespace spherelag {
namespace {

constexpr char kMagic[8] = {'S', 'P', 'H', 'L', 'A', 'G', 'B', '1'};

template <class T>
void put(std::ofstream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T get(std::ifstream& in, const std::filesystem::path& path) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) throw Error("truncated basis file " + path.string());
  return v;
}

const char* mode_name(FootprintRule::Mode m) {
  return m == FootprintRule::Mode::count ? "count" : "radius";
}

void finish(LocalBasis& basis, const NodeSet& set, std::vector<std::vector<SparseMatrix::Entry>> cols) {
  const std::size_t n = set.size();
  basis.per_center_n.resize(n);
  basis.max_stencil_radius = 0.0;
  for (std::size_t xi = 0; xi < n; ++xi) {
    basis.per_center_n[xi] = cols[xi].size();
    for (const auto& [row, value] : cols[xi]) {
      basis.max_stencil_radius = std::max(basis.max_stencil_radius, geodesic_distance(set[xi], set[row]));
    }
  }
  basis.A = SparseMatrix::from_columns(n, std::move(cols));
  basis.source = &set;
}

LocalBasis load_binary(const std::filesystem::path& path, const NodeSet& set) {
  std::ifstream in(path, std::ios::binary);
  char magic[8];
  in.read(magic, 8);
  if (!in || std::memcmp(magic, kMagic, 8) != 0) throw Error("not a binary basis file: " + path.string());
  const auto n = get<std::uint64_t>(in, path);
  const auto m = get<std::int32_t>(in, path);
  const auto mode = get<std::int32_t>(in, path);
  const auto mult = get<double>(in, path);
  const auto fixed = get<std::int64_t>(in, path);
  if (n != set.size()) {
    throw InvalidArgument("basis file is for N = " + std::to_string(n) + " but the node set has " +
                          std::to_string(set.size()) + " points");
  }
  LocalBasis basis;
  basis.spec = KernelSpec(m);
  basis.footprint.mode = mode == 0 ? FootprintRule::Mode::count : FootprintRule::Mode::radius;
  basis.footprint.M = mult;
  if (fixed >= 0) basis.footprint.fixed_n = static_cast<std::size_t>(fixed);
  const auto p = static_cast<Eigen::Index>(basis.spec.poly_dim());
  basis.C.resize(p, static_cast<Eigen::Index>(n));
  std::vector<std::vector<SparseMatrix::Entry>> cols(n);
  for (std::size_t xi = 0; xi < n; ++xi) {
    const auto count = get<std::uint64_t>(in, path);
    if (count > n) throw Error("corrupt basis file " + path.string());
    cols[xi].reserve(count);
    for (std::uint64_t k = 0; k < count; ++k) {
      const auto row = get<std::uint64_t>(in, path);
      const auto val = get<double>(in, path);
      if (row >= n) throw Error("corrupt basis file " + path.string());
      cols[xi].emplace_back(row, val);
    }
    for (Eigen::Index j = 0; j < p; ++j) basis.C(j, static_cast<Eigen::Index>(xi)) = get<double>(in, path);
  }
  finish(basis, set, std::move(cols));
  return basis;
}

LocalBasis load_csv(const std::filesystem::path& path, const NodeSet& set) {
  std::ifstream in(path);
  std::string line;
  std::size_t lineno = 0;
  bool have_header = false, have_values = false;
  LocalBasis basis;
  std::vector<std::vector<SparseMatrix::Entry>> cols;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::stringstream ss(line);
    std::string field;
    std::vector<std::string> f;
    while (std::getline(ss, field, ',')) f.push_back(field);
    try {
      if (!have_header) {
        if (f.empty() || f[0] != "basis") throw ParseError(path.string(), lineno, "missing basis header");
        have_header = true;
      } else if (!have_values) {
        if (f.size() != 6) throw ParseError(path.string(), lineno, "expected 6 header values");
        n = std::stoull(f[1]);
        if (n != set.size()) {
          throw InvalidArgument("basis file is for N = " + std::to_string(n) +
                                " but the node set has " + std::to_string(set.size()) + " points");
        }
        basis.spec = KernelSpec(std::stoi(f[2]));
        basis.footprint.mode = f[3] == "radius" ? FootprintRule::Mode::radius : FootprintRule::Mode::count;
        basis.footprint.M = std::stod(f[4]);
        const long long fixed = std::stoll(f[5]);
        if (fixed >= 0) basis.footprint.fixed_n = static_cast<std::size_t>(fixed);
        basis.C = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(basis.spec.poly_dim()),
                                        static_cast<Eigen::Index>(n));
        cols.resize(n);
        have_values = true;
      } else {
        if (f.size() != 4) throw ParseError(path.string(), lineno, "expected 4 fields");
        const std::size_t col = std::stoull(f[1]);
        const std::size_t row = std::stoull(f[2]);
        const double val = std::stod(f[3]);
        if (col >= n) throw ParseError(path.string(), lineno, "column out of range");
        if (f[0] == "k") {
          if (row >= n) throw ParseError(path.string(), lineno, "row out of range");
          cols[col].emplace_back(row, val);
        } else if (f[0] == "p") {
          if (row >= basis.spec.poly_dim()) throw ParseError(path.string(), lineno, "j out of range");
          basis.C(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col)) = val;
        } else {
          throw ParseError(path.string(), lineno, "unknown row kind '" + f[0] + "'");
        }
      }
    } catch (const std::invalid_argument&) {
      throw ParseError(path.string(), lineno, "malformed number");
    } catch (const std::out_of_range&) {
      throw ParseError(path.string(), lineno, "number out of range");
    }
  }
  if (!have_values) throw Error("basis CSV has no header: " + path.string());
  finish(basis, set, std::move(cols));
  return basis;
}

}  // namespace

void save_basis(const LocalBasis& basis, const std::filesystem::path& path, BasisFormat format,
                std::span<const std::string> comment_lines) {
  const std::size_t n = basis.size();
  const auto p = static_cast<Eigen::Index>(basis.spec.poly_dim());
  const std::int64_t fixed = basis.footprint.fixed_n ? static_cast<std::int64_t>(*basis.footprint.fixed_n) : -1;
  if (format == BasisFormat::binary) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write basis file " + path.string());
    out.write(kMagic, 8);
    put<std::uint64_t>(out, n);
    put<std::int32_t>(out, basis.spec.m());
    put<std::int32_t>(out, basis.footprint.mode == FootprintRule::Mode::count ? 0 : 1);
    put<double>(out, basis.footprint.M);
    put<std::int64_t>(out, fixed);
    for (std::size_t xi = 0; xi < n; ++xi) {
      const auto rows = basis.A.column_rows(xi);
      const auto vals = basis.A.column_values(xi);
      put<std::uint64_t>(out, rows.size());
      for (std::size_t k = 0; k < rows.size(); ++k) {
        put<std::uint64_t>(out, rows[k]);
        put<double>(out, vals[k]);
      }
      for (Eigen::Index j = 0; j < p; ++j) put<double>(out, basis.C(j, static_cast<Eigen::Index>(xi)));
    }
    if (!out) throw Error("error writing basis file " + path.string());
    return;
  }

  std::FILE* f = std::fopen(path.string().c_str(), "w");
  if (!f) throw Error("cannot write basis file " + path.string());
  for (const auto& c : comment_lines) std::fprintf(f, "# %s\n", c.c_str());
  std::fprintf(f, "basis,N,m,mode,M,fixed_n\n");
  std::fprintf(f, "basis,%zu,%d,%s,%.17g,%lld\n", n, basis.spec.m(), mode_name(basis.footprint.mode),
               basis.footprint.M, static_cast<long long>(fixed));
  for (std::size_t xi = 0; xi < n; ++xi) {
    const auto rows = basis.A.column_rows(xi);
    const auto vals = basis.A.column_values(xi);
    for (std::size_t k = 0; k < rows.size(); ++k) std::fprintf(f, "k,%zu,%zu,%.17g\n", xi, rows[k], vals[k]);
    for (Eigen::Index j = 0; j < p; ++j) {
      std::fprintf(f, "p,%zu,%td,%.17g\n", xi, j, basis.C(j, static_cast<Eigen::Index>(xi)));
    }
  }
  if (std::fclose(f) != 0) throw Error("error writing basis file " + path.string());
}

LocalBasis load_basis(const std::filesystem::path& path, const NodeSet& set) {
  std::ifstream probe(path, std::ios::binary);
  if (!probe) throw Error("cannot open basis file " + path.string());
  char magic[8] = {};
  probe.read(magic, 8);
  const bool binary = probe.gcount() == 8 && std::memcmp(magic, kMagic, 8) == 0;
  probe.close();
  return binary ? load_binary(path, set) : load_csv(path, set);
}

}  // namespace spherelag

#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "spherelag/error.hpp"
#include "spherelag/geom.hpp"
#include "spherelag/gmres.hpp"
#include "spherelag/kernel.hpp"
#include "spherelag/neighbors.hpp"
#include "spherelag/sparse.hpp"

namespace spherelag {

// How many neighbours make up the stencil of each local Lagrange function.
//
// Count mode:  n(N) = min(N, max(m^2 + 1, round(M * ceil(log10(N)^2)))), so
//              M = 7 reproduces default_footprint; fixed_n overrides it.
// Radius mode: all nodes within K h log(1/h) of the center, K = M.
struct FootprintRule {
  enum class Mode { count, radius };

  Mode mode = Mode::count;
  double M = 7.0;
  std::optional<std::size_t> fixed_n;

  static FootprintRule count(double multiplier = 7.0) { return {Mode::count, multiplier, {}}; }
  static FootprintRule fixed(std::size_t n) { return {Mode::count, 7.0, n}; }
  static FootprintRule radius(double k) { return {Mode::radius, k, {}}; }

  std::size_t stencil_size(std::size_t n_nodes, int m) const;
  double stencil_radius(double h) const;
};

/// n = min(N, max(m^2 + 1, 7 ceil(log10(N)^2))).
std::size_t default_footprint(std::size_t n_nodes, int m = 2);

// All local Lagrange functions of a node set:
//   chi_xi = sum_{zeta in stencil(xi)} A(zeta, xi) k(., zeta) + sum_j C(j, xi) phi_j,
// cardinal on the stencil and with A's column orthogonal to the harmonic samples
// there. Holds a pointer to the node set, which must outlive it.
struct LocalBasis {
  SparseMatrix A;     // N x N
  Eigen::MatrixXd C;  // m^2 x N
  FootprintRule footprint;
  std::vector<std::size_t> per_center_n;
  KernelSpec spec;
  const NodeSet* source = nullptr;
  double max_stencil_radius = 0.0;  // radians, over all centers

  std::size_t size() const noexcept { return per_center_n.size(); }
  std::span<const std::size_t> stencil(std::size_t center) const { return A.column_rows(center); }
};

struct LocalBasisOptions {
  // Retry a failed stencil once with twice the count (or radius).
  bool grow_on_failure = false;
  // Mesh norm for radius mode; estimated with mesh_stats when absent.
  std::optional<double> mesh_norm;
};

/// Throws StencilFailure listing every center whose small system was singular.
LocalBasis build_local_basis(const NodeSet& set, const KernelSpec& spec, const FootprintRule& rule,
                             const LocalBasisOptions& options = {});

double eval_local_function(const LocalBasis& basis, std::size_t center, const SpherePoint& x);

// x -> sum_xi f(xi) chi_xi(x).
//
// The default evaluation folds the data into one kernel expansion
// (a = A f, c = C f), which is exact. With `truncate` set, only centers within
// three stencil radii of x contribute.
class QuasiInterpolant {
 public:
  QuasiInterpolant(const LocalBasis& basis, Eigen::VectorXd f, bool truncate);

  double operator()(const SpherePoint& x) const;
  Eigen::VectorXd eval(std::span<const SpherePoint> xs) const;
  const KernelExpansion& expansion() const noexcept { return expansion_; }

 private:
  const LocalBasis* basis_;
  Eigen::VectorXd f_;
  bool truncate_;
  KernelExpansion expansion_;
  std::optional<NeighborIndex> index_;
};

QuasiInterpolant quasi_interpolate(const LocalBasis& basis, const Eigen::VectorXd& f_values,
                                   bool truncate = false);

// Applies the N x N kernel block of a node set. Small sets keep the matrix;
// larger ones recompute entries row block by row block.
class KernelOperator {
 public:
  static constexpr std::size_t kDefaultMaterializeCap = 12000;

  KernelOperator(const NodeSet& set, const KernelSpec& spec,
                 std::size_t materialize_cap = kDefaultMaterializeCap);

  std::size_t size() const noexcept { return set_->size(); }
  bool materialized() const noexcept { return dense_.size() > 0; }
  void apply(const Eigen::VectorXd& v, Eigen::VectorXd& out) const;

 private:
  const NodeSet* set_;
  KernelSpec spec_;
  Eigen::MatrixXd dense_;
};

struct PreconditionedOptions {
  enum class InitialGuess { data, zero };

  double tol = 1e-6;
  std::size_t maxit = 200;
  InitialGuess x0 = InitialGuess::data;
  std::size_t materialize_cap = KernelOperator::kDefaultMaterializeCap;
  std::size_t max_nodes = 200000;
};

struct PreconditionedSolution {
  Eigen::VectorXd a;        // kernel coefficients in the standard basis
  Eigen::VectorXd c;        // polynomial coefficients
  Eigen::VectorXd a_local;  // coefficients in the local Lagrange basis
  GmresReport report;
  double interp_residual = 0.0;  // ||K a + Phi c - f||_inf / ||f||_inf
};

class NotConverged : public Error {
 public:
  explicit NotConverged(PreconditionedSolution best);
  const PreconditionedSolution& best() const noexcept { return best_; }

 private:
  PreconditionedSolution best_;
};

/// Solves (K A + Phi C) a_local = f by GMRES and maps back with a = A a_local,
/// c = C a_local. Throws NotConverged with the best iterate.
PreconditionedSolution interpolate_preconditioned(const NodeSet& set, const KernelSpec& spec,
                                                  const LocalBasis& basis,
                                                  const Eigen::VectorXd& f_values,
                                                  const PreconditionedOptions& options = {});

/// Dense K A + Phi C; entry (zeta, xi) is chi_xi(zeta).
Eigen::MatrixXd preconditioned_matrix(const NodeSet& set, const KernelSpec& spec,
                                      const LocalBasis& basis);

// Basis file I/O. Binary layout (little endian):
//   "SPHLAGB1", u64 N, i32 m, i32 mode, f64 M, i64 fixed_n (-1 if none),
//   then per column: u64 count, count x (u64 row, f64 value), m^2 x f64.
// CSV layout: '#' comment lines, a "basis,N,m,mode,M,fixed_n" header row
// followed by its values, then "k,col,row,value" and "p,col,j,value" rows.
enum class BasisFormat { binary, csv };

void save_basis(const LocalBasis& basis, const std::filesystem::path& path, BasisFormat format,
                std::span<const std::string> comment_lines = {});
/// Detects the format. The node set must match the stored N.
LocalBasis load_basis(const std::filesystem::path& path, const NodeSet& set);

}  // namespace spherelag

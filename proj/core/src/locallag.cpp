#include "spherelag/locallag.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "spherelag/dense.hpp"
#include "spherelag/parallel.hpp"

namespace spherelag {

std::size_t FootprintRule::stencil_size(std::size_t n_nodes, int m) const {
  const std::size_t floor_n = static_cast<std::size_t>(m * m) + 1;
  if (fixed_n) {
    if (*fixed_n < floor_n && *fixed_n < n_nodes) {
      throw InvalidArgument("footprint: fixed stencil size " + std::to_string(*fixed_n) +
                            " is below m^2 + 1 = " + std::to_string(floor_n));
    }
    return std::min(n_nodes, *fixed_n);
  }
  if (!(M > 0.0)) throw InvalidArgument("footprint: multiplier M must be positive");
  const double l10 = std::log10(static_cast<double>(n_nodes));
  const double blocks = std::ceil(l10 * l10);
  const auto n = static_cast<std::size_t>(std::llround(M * blocks));
  return std::min(n_nodes, std::max(floor_n, n));
}

double FootprintRule::stencil_radius(double h) const {
  if (!(h > 0.0 && h < 1.0)) throw InvalidArgument("footprint: radius mode needs 0 < h < 1");
  return M * h * std::log(1.0 / h);
}

std::size_t default_footprint(std::size_t n_nodes, int m) {
  if (n_nodes < 2) throw InvalidArgument("default_footprint: need N >= 2");
  return FootprintRule::count(7.0).stencil_size(n_nodes, m);
}

namespace {

struct StencilResult {
  std::vector<std::size_t> indices;
  Eigen::VectorXd a;
  Eigen::VectorXd c;
  double radius = 0.0;
  bool ok = false;
};

StencilResult solve_stencil(const NodeSet& set, const KernelSpec& spec, std::size_t center,
                            std::vector<std::size_t> indices) {
  StencilResult out;
  out.indices = std::move(indices);
  try {
    SaddleSystem system = assemble_saddle(spec, set, out.indices);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(system.n() + system.p()));
    const auto pos = std::find(out.indices.begin(), out.indices.end(), center) - out.indices.begin();
    rhs[pos] = 1.0;
    auto sol = factor_solve(system, rhs);
    out.a = std::move(sol.a);
    out.c = std::move(sol.c);
    out.ok = true;
  } catch (const SingularSystem&) {
    out.ok = false;
  }
  for (std::size_t idx : out.indices) {
    out.radius = std::max(out.radius, geodesic_distance(set[center], set[idx]));
  }
  return out;
}

}  // namespace

LocalBasis build_local_basis(const NodeSet& set, const KernelSpec& spec, const FootprintRule& rule,
                             const LocalBasisOptions& options) {
  const std::size_t n = set.size();
  if (n < spec.poly_dim() + 1) {
    throw InvalidArgument("build_local_basis: need at least m^2 + 1 = " +
                          std::to_string(spec.poly_dim() + 1) + " nodes");
  }
  const NeighborIndex index(set);

  std::size_t count = 0;
  double radius = 0.0;
  if (rule.mode == FootprintRule::Mode::count) {
    count = rule.stencil_size(n, spec.m());
  } else {
    const double h = options.mesh_norm ? *options.mesh_norm : mesh_stats(set).h;
    radius = rule.stencil_radius(h);
  }
  auto stencil_for = [&](std::size_t center, int growth) {
    if (rule.mode == FootprintRule::Mode::count) {
      return index.knn(center, std::min(n, count << growth));
    }
    return index.ball(set[center], radius * static_cast<double>(1 << growth));
  };

  std::vector<StencilResult> results(n);
  parallel_for(n, [&](std::size_t begin, std::size_t end) {
    for (std::size_t xi = begin; xi < end; ++xi) {
      results[xi] = solve_stencil(set, spec, xi, stencil_for(xi, 0));
      if (!results[xi].ok && options.grow_on_failure) {
        results[xi] = solve_stencil(set, spec, xi, stencil_for(xi, 1));
      }
    }
  });

  std::vector<std::size_t> failed;
  for (std::size_t xi = 0; xi < n; ++xi) {
    if (!results[xi].ok) failed.push_back(xi);
  }
  if (!failed.empty()) throw StencilFailure(std::move(failed));

  LocalBasis basis;
  basis.footprint = rule;
  basis.spec = spec;
  basis.source = &set;
  basis.per_center_n.resize(n);
  basis.C.resize(static_cast<Eigen::Index>(spec.poly_dim()), static_cast<Eigen::Index>(n));
  std::vector<std::vector<SparseMatrix::Entry>> columns(n);
  for (std::size_t xi = 0; xi < n; ++xi) {
    auto& r = results[xi];
    basis.per_center_n[xi] = r.indices.size();
    basis.max_stencil_radius = std::max(basis.max_stencil_radius, r.radius);
    basis.C.col(static_cast<Eigen::Index>(xi)) = r.c;
    columns[xi].reserve(r.indices.size());
    for (std::size_t k = 0; k < r.indices.size(); ++k) {
      columns[xi].emplace_back(r.indices[k], r.a[static_cast<Eigen::Index>(k)]);
    }
    r = StencilResult{};
  }
  basis.A = SparseMatrix::from_columns(n, std::move(columns));
  return basis;
}

double eval_local_function(const LocalBasis& basis, std::size_t center, const SpherePoint& x) {
  if (center >= basis.size()) throw InvalidArgument("eval_local_function: center out of range");
  const NodeSet& set = *basis.source;
  const auto rows = basis.A.column_rows(center);
  const auto vals = basis.A.column_values(center);
  double s = 0.0;
  for (std::size_t k = 0; k < rows.size(); ++k) s += vals[k] * basis.spec(x.dot(set[rows[k]]));
  const Eigen::VectorXd phi = basis.spec.harmonics().eval(x);
  return s + phi.dot(basis.C.col(static_cast<Eigen::Index>(center)));
}

QuasiInterpolant::QuasiInterpolant(const LocalBasis& basis, Eigen::VectorXd f, bool truncate)
    : basis_(&basis),
      f_(std::move(f)),
      truncate_(truncate),
      expansion_(basis.spec, *basis.source, spmv(basis.A, f_), basis.C * f_) {
  if (truncate_) index_.emplace(*basis.source);
}

double QuasiInterpolant::operator()(const SpherePoint& x) const {
  if (!truncate_) return expansion_(x);
  const double reach = std::min(3.0 * basis_->max_stencil_radius, 3.2);
  double s = 0.0;
  for (std::size_t xi : index_->ball(x, reach)) {
    const double fx = f_[static_cast<Eigen::Index>(xi)];
    if (fx != 0.0) s += fx * eval_local_function(*basis_, xi, x);
  }
  return s;
}

Eigen::VectorXd QuasiInterpolant::eval(std::span<const SpherePoint> xs) const {
  if (!truncate_) return expansion_.eval(xs);
  Eigen::VectorXd out(static_cast<Eigen::Index>(xs.size()));
  parallel_for(xs.size(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) out[static_cast<Eigen::Index>(i)] = (*this)(xs[i]);
  });
  return out;
}

QuasiInterpolant quasi_interpolate(const LocalBasis& basis, const Eigen::VectorXd& f_values,
                                   bool truncate) {
  if (static_cast<std::size_t>(f_values.size()) != basis.size()) {
    throw InvalidArgument("quasi_interpolate: expected " + std::to_string(basis.size()) +
                          " data values, got " + std::to_string(f_values.size()));
  }
  return QuasiInterpolant(basis, f_values, truncate);
}

KernelOperator::KernelOperator(const NodeSet& set, const KernelSpec& spec,
                               std::size_t materialize_cap)
    : set_(&set), spec_(spec) {
  if (set.size() <= materialize_cap) dense_ = kernel_matrix(spec, set);
}

void KernelOperator::apply(const Eigen::VectorXd& v, Eigen::VectorXd& out) const {
  const std::size_t n = set_->size();
  if (static_cast<std::size_t>(v.size()) != n) throw InvalidArgument("KernelOperator: size mismatch");
  if (materialized()) {
    out.noalias() = dense_ * v;
    return;
  }
  out.resize(static_cast<Eigen::Index>(n));
  const NodeSet& set = *set_;
  parallel_for(n, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const SpherePoint& xi = set[i];
      double s = 0.0;
      for (std::size_t j = 0; j < n; ++j) s += spec_(xi.dot(set[j])) * v[static_cast<Eigen::Index>(j)];
      out[static_cast<Eigen::Index>(i)] = s;
    }
  });
}

NotConverged::NotConverged(PreconditionedSolution best)
    : Error("GMRES did not converge in " + std::to_string(best.report.iterations) +
            " iterations (relative residual " + std::to_string(best.report.final_relres) + ")"),
      best_(std::move(best)) {}

PreconditionedSolution interpolate_preconditioned(const NodeSet& set, const KernelSpec& spec,
                                                  const LocalBasis& basis,
                                                  const Eigen::VectorXd& f_values,
                                                  const PreconditionedOptions& options) {
  const std::size_t n = set.size();
  if (static_cast<std::size_t>(f_values.size()) != n) {
    throw InvalidArgument("interpolate_preconditioned: expected " + std::to_string(n) +
                          " data values, got " + std::to_string(f_values.size()));
  }
  if (basis.size() != n) throw InvalidArgument("interpolate_preconditioned: basis size mismatch");
  if (n > options.max_nodes) {
    throw ResourceLimit("interpolate_preconditioned: N = " + std::to_string(n) +
                        " exceeds the node cap of " + std::to_string(options.max_nodes));
  }

  const KernelOperator kernel(set, spec, options.materialize_cap);
  const Eigen::MatrixXd phi = spec.harmonics().sample(set);

  Eigen::VectorXd ka(static_cast<Eigen::Index>(n));
  auto apply_full = [&](const Eigen::VectorXd& a, const Eigen::VectorXd& c, Eigen::VectorXd& out) {
    kernel.apply(a, ka);
    out = ka + phi * c;
  };
  const LinearOperator apply_b = [&](const Eigen::VectorXd& v, Eigen::VectorXd& out) {
    apply_full(spmv(basis.A, v), basis.C * v, out);
  };

  const Eigen::VectorXd x0 = options.x0 == PreconditionedOptions::InitialGuess::data
                                 ? f_values
                                 : Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
  GmresResult res = gmres(apply_b, LinearOperator{}, f_values, x0, {options.tol, options.maxit});

  PreconditionedSolution sol;
  sol.a_local = std::move(res.x);
  sol.a = spmv(basis.A, sol.a_local);
  sol.c = basis.C * sol.a_local;
  sol.report = std::move(res.report);

  Eigen::VectorXd fit(static_cast<Eigen::Index>(n));
  apply_full(sol.a, sol.c, fit);
  const double fnorm = f_values.lpNorm<Eigen::Infinity>();
  const double rnorm = (fit - f_values).lpNorm<Eigen::Infinity>();
  sol.interp_residual = fnorm > 0.0 ? rnorm / fnorm : rnorm;

  if (!sol.report.converged) throw NotConverged(std::move(sol));
  return sol;
}

Eigen::MatrixXd preconditioned_matrix(const NodeSet& set, const KernelSpec& spec,
                                      const LocalBasis& basis) {
  const std::size_t n = set.size();
  const Eigen::MatrixXd phi = spec.harmonics().sample(set);
  Eigen::MatrixXd b(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  parallel_for(n, [&](std::size_t begin, std::size_t end) {
    for (std::size_t xi = begin; xi < end; ++xi) {
      const auto rows = basis.A.column_rows(xi);
      const auto vals = basis.A.column_values(xi);
      auto col = b.col(static_cast<Eigen::Index>(xi));
      col = phi * basis.C.col(static_cast<Eigen::Index>(xi));
      for (std::size_t z = 0; z < n; ++z) {
        double s = 0.0;
        for (std::size_t k = 0; k < rows.size(); ++k) s += vals[k] * spec(set[z].dot(set[rows[k]]));
        col[static_cast<Eigen::Index>(z)] += s;
      }
    }
  });
  return b;
}

}  // namespace spherelag

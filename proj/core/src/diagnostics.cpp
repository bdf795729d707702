#include "spherelag/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "spherelag/error.hpp"
#include "spherelag/lagrange.hpp"
#include "spherelag/parallel.hpp"

namespace spherelag {

std::string to_string(DecayKind k) {
  return k == DecayKind::function ? "function" : "coefficient";
}

DecayFit fit_decay(std::span<const DecaySample> samples, DecayKind kind, double q, int m,
                   const FitOptions& options) {
  DecayFit fit;
  fit.kind = kind;
  fit.q_power = kind == DecayKind::coefficient ? 2 - 2 * m : 0;
  if (kind == DecayKind::coefficient && !(q > 0.0)) {
    throw InvalidArgument("fit_decay: coefficient fits need a positive separation radius");
  }
  const double scale = kind == DecayKind::coefficient ? std::pow(q, -fit.q_power) : 1.0;
  const double floor = options.plateau_floor;

  std::size_t below = 0;
  for (const auto& s : samples) {
    if (!(std::abs(s.value) * scale > floor)) ++below;
  }
  fit.plateau_fraction = samples.empty() ? 0.0 : static_cast<double>(below) / samples.size();

  double t_max = std::numeric_limits<double>::infinity();
  if (options.t_max) {
    t_max = *options.t_max;
  } else {
    // Onset of the plateau: nothing above the floor from here on.
    double last_above = -std::numeric_limits<double>::infinity();
    for (const auto& s : samples) {
      if (std::abs(s.value) * scale > floor) last_above = std::max(last_above, s.t);
    }
    double onset = std::numeric_limits<double>::infinity();
    for (const auto& s : samples) {
      if (s.t > last_above) onset = std::min(onset, s.t);
    }
    t_max = onset;
  }

  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  std::size_t n = 0;
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (const auto& s : samples) {
    const double v = std::abs(s.value) * scale;
    if (s.t < options.t_min || s.t > t_max || !(v > floor) || !std::isfinite(v)) continue;
    const double y = std::log(v);
    sx += s.t;
    sy += y;
    sxx += s.t * s.t;
    sxy += s.t * y;
    syy += y * y;
    lo = std::min(lo, s.t);
    hi = std::max(hi, s.t);
    ++n;
  }
  if (n < 10) {
    throw InsufficientSamples("fit_decay: " + std::to_string(n) +
                              " samples in the fit window, need at least 10");
  }
  const double dn = static_cast<double>(n);
  const double vxx = sxx - sx * sx / dn;
  const double vxy = sxy - sx * sy / dn;
  const double vyy = syy - sy * sy / dn;
  if (!(vxx > 0.0)) throw InsufficientSamples("fit_decay: all samples share one distance");
  const double slope = vxy / vxx;
  const double intercept = (sy - slope * sx) / dn;
  fit.nu = -slope;
  fit.C = std::exp(intercept);
  fit.r2 = vyy > 0.0 ? std::clamp(vxy * vxy / (vxx * vyy), 0.0, 1.0) : 1.0;
  fit.t_min = lo;
  fit.t_max = hi;
  fit.n_used = n;
  return fit;
}

std::vector<double> band_maxima(const std::function<Eigen::VectorXd(std::span<const SpherePoint>)>& g,
                                const SpherePoint& center, std::size_t n_lon, std::size_t n_lat) {
  if (n_lon == 0 || n_lat == 0) throw InvalidArgument("band_maxima: empty probe grid");
  const Frame frame = frame_with_pole(center);
  std::vector<double> out(n_lat, 0.0);
  std::vector<SpherePoint> ring(n_lon);
  for (std::size_t i = 0; i < n_lat; ++i) {
    const double theta = (static_cast<double>(i) + 0.5) * std::numbers::pi / static_cast<double>(n_lat);
    const double st = std::sin(theta), ct = std::cos(theta);
    for (std::size_t j = 0; j < n_lon; ++j) {
      const double lon = 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(n_lon);
      ring[j] = frame.to_world(st * std::cos(lon), st * std::sin(lon), ct);
    }
    const Eigen::VectorXd v = g(ring);
    out[i] = v.cwiseAbs().maxCoeff();
  }
  return out;
}

DecayStudy decay_study(const NodeSet& set, const KernelSpec& spec, std::size_t center,
                       const DecayStudyOptions& options) {
  if (center >= set.size()) throw InvalidArgument("decay_study: center out of range");
  DecayStudy out;
  out.center = center;
  out.stats = set.stats() ? *set.stats() : mesh_stats(set);
  const double h = out.stats.h;

  const SaddleSolution col = lagrange_column(set, spec, center, options.dense_cap);
  const KernelExpansion chi(spec, set, col.a, col.c);

  const std::vector<double> bands = band_maxima(
      [&](std::span<const SpherePoint> xs) { return chi.eval(xs); }, set[center], options.n_lon,
      options.n_lat);
  out.function_samples.reserve(bands.size());
  for (std::size_t i = 0; i < bands.size(); ++i) {
    const double theta = (static_cast<double>(i) + 0.5) * std::numbers::pi / static_cast<double>(options.n_lat);
    out.function_samples.push_back({theta / h, bands[i]});
  }

  out.coefficient_samples.reserve(set.size());
  for (std::size_t z = 0; z < set.size(); ++z) {
    out.coefficient_samples.push_back(
        {geodesic_distance(set[center], set[z]) / h, std::abs(col.a[static_cast<Eigen::Index>(z)])});
  }

  out.function_fit = fit_decay(out.function_samples, DecayKind::function, out.stats.q, spec.m(), options.fit);
  out.coefficient_fit =
      fit_decay(out.coefficient_samples, DecayKind::coefficient, out.stats.q, spec.m(), options.fit);
  return out;
}

double observed_order(double e_coarse, double e_fine, double h_coarse, double h_fine) {
  return std::log(e_coarse / e_fine) / std::log(h_coarse / h_fine);
}

std::vector<ConvergenceRow> convergence_study(std::span<const NodeSet> sets, const KernelSpec& spec,
                                              const ScalarField& f, const ConvergenceOptions& options) {
  if (sets.size() < 3) throw InvalidArgument("convergence_study: need at least three node sets");

  const std::vector<SpherePoint> probes = probe_points(options.probe_n);
  Eigen::VectorXd exact(static_cast<Eigen::Index>(probes.size()));
  for (std::size_t i = 0; i < probes.size(); ++i) exact[static_cast<Eigen::Index>(i)] = f(probes[i]);

  std::vector<ConvergenceRow> rows;
  for (const NodeSet& set : sets) {
    ConvergenceRow row;
    row.n_nodes = set.size();
    row.h = (set.stats() ? *set.stats() : mesh_stats(set)).h;

    Eigen::VectorXd data(static_cast<Eigen::Index>(set.size()));
    for (std::size_t i = 0; i < set.size(); ++i) data[static_cast<Eigen::Index>(i)] = f(set[i]);

    LocalBasisOptions lopts;
    lopts.mesh_norm = row.h;
    const LocalBasis basis = build_local_basis(set, spec, options.footprint, lopts);

    Eigen::VectorXd a, c;
    if (set.size() <= options.direct_cap) {
      SaddleSystem system = assemble_saddle(spec, set);
      Eigen::VectorXd rhs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(set.size() + spec.poly_dim()));
      rhs.head(static_cast<Eigen::Index>(set.size())) = data;
      auto sol = factor_solve(system, rhs);
      a = std::move(sol.a);
      c = std::move(sol.c);
    } else {
      PreconditionedOptions popts;
      popts.tol = options.tol;
      popts.maxit = options.maxit;
      auto sol = interpolate_preconditioned(set, spec, basis, data, popts);
      row.gmres_iterations = sol.report.iterations;
      a = std::move(sol.a);
      c = std::move(sol.c);
    }
    const KernelExpansion interp(spec, set, a, c);
    row.interp_error = (interp.eval(probes) - exact).lpNorm<Eigen::Infinity>();

    const QuasiInterpolant quasi = quasi_interpolate(basis, data);
    row.quasi_error = (quasi.eval(probes) - exact).lpNorm<Eigen::Infinity>();

    if (!rows.empty()) {
      const ConvergenceRow& prev = rows.back();
      row.interp_order = observed_order(prev.interp_error, row.interp_error, prev.h, row.h);
      row.quasi_order = observed_order(prev.quasi_error, row.quasi_error, prev.h, row.h);
    }
    rows.push_back(row);
  }
  return rows;
}

Table1Row table1_row(const std::string& label, const NodeSet& set, const KernelSpec& spec,
                     std::size_t center, const DecayStudyOptions& options) {
  const DecayStudy study = decay_study(set, spec, center, options);
  return Table1Row{label, set.size(), study.stats, study.function_fit, study.coefficient_fit};
}

}  // namespace spherelag

#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "spherelag/geom.hpp"
#include "spherelag/kernel.hpp"
#include "spherelag/locallag.hpp"

namespace spherelag {

struct DecaySample {
  double t = 0.0;      // distance / h
  double value = 0.0;  // |value|, before any prefactor normalization
};

enum class DecayKind { function, coefficient };

struct DecayFit {
  double nu = 0.0;
  double C = 0.0;
  double t_min = 0.0;
  double t_max = 0.0;
  double r2 = 0.0;
  DecayKind kind = DecayKind::function;
  int q_power = 0;            // 0 for function values, 2 - 2m for coefficients
  std::size_t n_used = 0;     // samples inside the window and above the floor
  double plateau_fraction = 0.0;  // share of all samples at or below the floor
};

struct FitOptions {
  double plateau_floor = 1e-10;
  double t_min = 2.0;
  // Upper end of the window; by default the plateau onset, i.e. the smallest t
  // beyond which no (normalized) sample exceeds plateau_floor.
  std::optional<double> t_max;
};

std::string to_string(DecayKind k);

/// Least-squares line through (t, log v'), v' = v q^(2m-2) for coefficients and
/// v' = v for function values, over the fit window. nu = -slope,
/// C = exp(intercept). Throws InsufficientSamples with fewer than 10 usable samples.
DecayFit fit_decay(std::span<const DecaySample> samples, DecayKind kind, double q, int m,
                   const FitOptions& options = {});

struct DecayStudyOptions {
  std::size_t n_lon = 400;
  std::size_t n_lat = 200;
  FitOptions fit;
  std::size_t dense_cap = 20000;
};

struct DecayStudy {
  std::size_t center = 0;
  MeshStats stats;
  std::vector<DecaySample> function_samples;     // band maxima, one per colatitude band
  std::vector<DecaySample> coefficient_samples;  // one per node
  DecayFit function_fit;
  DecayFit coefficient_fit;
};

/// Uses the node set's cached mesh statistics when present.
DecayStudy decay_study(const NodeSet& set, const KernelSpec& spec, std::size_t center,
                       const DecayStudyOptions& options = {});

/// Maximum of |g| over each colatitude band of an n_lon x n_lat grid in the
/// frame whose north pole is `center`. Band i is centered at colatitude
/// (i + 1/2) pi / n_lat.
std::vector<double> band_maxima(const std::function<Eigen::VectorXd(std::span<const SpherePoint>)>& g,
                                const SpherePoint& center, std::size_t n_lon, std::size_t n_lat);

using ScalarField = std::function<double(const SpherePoint&)>;

struct ConvergenceRow {
  std::size_t n_nodes = 0;
  double h = 0.0;
  double interp_error = 0.0;
  double quasi_error = 0.0;
  std::optional<double> interp_order;  // relative to the previous row
  std::optional<double> quasi_order;
  std::size_t gmres_iterations = 0;    // 0 when solved directly
};

struct ConvergenceOptions {
  std::size_t probe_n = 20000;
  FootprintRule footprint = FootprintRule::count();
  // Interpolants up to this size use the dense saddle solve, larger ones the
  // preconditioned iteration.
  std::size_t direct_cap = 2000;
  double tol = 1e-12;
  std::size_t maxit = 300;
};

/// Needs at least three node sets. Errors are sup norms over a fixed probe set.
std::vector<ConvergenceRow> convergence_study(std::span<const NodeSet> sets, const KernelSpec& spec,
                                              const ScalarField& f,
                                              const ConvergenceOptions& options = {});

double observed_order(double e_coarse, double e_fine, double h_coarse, double h_fine);

struct Table1Row {
  std::string label;
  std::size_t n_nodes = 0;
  MeshStats stats;
  DecayFit function_fit;
  DecayFit coefficient_fit;
};

Table1Row table1_row(const std::string& label, const NodeSet& set, const KernelSpec& spec,
                     std::size_t center = 0, const DecayStudyOptions& options = {});

}  // namespace spherelag

#include "spherelag_cli/cli.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "spherelag/diagnostics.hpp"
#include "spherelag/error.hpp"
#include "spherelag/gramstudy.hpp"
#include "spherelag/lagrange.hpp"
#include "spherelag/locallag.hpp"
#include "spherelag/parallel.hpp"
#include "spherelag_cli/io.hpp"

namespace spherelag::cli {
namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

// CSV output with the run configuration as '#' comment lines.
class CsvFile {
 public:
  CsvFile(const std::string& path, const RunConfig& config) : f_(std::fopen(path.c_str(), "w")), path_(path) {
    if (!f_) throw Error("cannot write " + path);
    for (const auto& l : config.lines()) std::fprintf(f_, "# %s\n", l.c_str());
  }
  CsvFile(const CsvFile&) = delete;
  CsvFile& operator=(const CsvFile&) = delete;
  ~CsvFile() {
    if (f_) std::fclose(f_);
  }

  void row(const char* text) { std::fputs(text, f_); }

  template <class... Args>
  void row(const char* format, Args... args) {
    std::fprintf(f_, format, args...);
  }

  void close() {
    const int rc = std::fclose(f_);
    f_ = nullptr;
    if (rc != 0) throw Error("error writing " + path_);
  }

 private:
  std::FILE* f_;
  std::string path_;
};

// Same header convention for reports printed to stdout.
void print_header(std::ostream& out, const RunConfig& config) {
  for (const auto& l : config.lines()) out << "# " << l << '\n';
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

NodeSet load(const std::string& path, std::ostream& err) {
  LoadedNodes loaded = load_nodes(path);
  if (loaded.normalized_rows > 0) {
    err << "note: normalized " << loaded.normalized_rows << " non-unit rows of " << path << '\n';
  }
  return std::move(loaded.nodes);
}

std::optional<ScalarField> named_field(const std::string& name) {
  if (name == "exp_z") return ScalarField([](const SpherePoint& p) { return std::exp(p.z); });
  if (name == "linear") return ScalarField([](const SpherePoint& p) { return 1.0 + p.x - 2.0 * p.y + 0.5 * p.z; });
  if (name == "gaussian") {
    return ScalarField([](const SpherePoint& p) { return std::exp(-10.0 * ((p.x - 1) * (p.x - 1) + p.y * p.y + p.z * p.z)); });
  }
  return std::nullopt;
}

// "random" (uniform in [-1, 1]), a named field, or a file of values.
Eigen::VectorXd node_data(const std::string& spec, const NodeSet& set, unsigned long long seed) {
  const auto n = static_cast<Eigen::Index>(set.size());
  if (spec == "random") {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Eigen::VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i) v[i] = u(rng);
    return v;
  }
  if (spec.rfind("field:", 0) == 0) {
    const auto f = named_field(spec.substr(6));
    if (!f) throw InvalidArgument("unknown field '" + spec.substr(6) + "' (exp_z, linear, gaussian)");
    Eigen::VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i) v[i] = (*f)(set[static_cast<std::size_t>(i)]);
    return v;
  }
  Eigen::VectorXd v = read_values(spec);
  if (v.size() != n) {
    throw InvalidArgument("data file has " + std::to_string(v.size()) + " values for " +
                          std::to_string(n) + " nodes");
  }
  return v;
}

// "AxB" as two positive counts.
struct Grid {
  std::size_t first = 0;
  std::size_t second = 0;
};

std::optional<Grid> parse_grid(const std::string& s) {
  const auto x = s.find('x');
  if (x == std::string::npos) return std::nullopt;
  try {
    std::size_t used = 0;
    const auto a = std::stoul(s.substr(0, x), &used);
    if (used != x) return std::nullopt;
    const std::string rest = s.substr(x + 1);
    const auto b = std::stoul(rest, &used);
    if (used != rest.size() || a == 0 || b == 0) return std::nullopt;
    return Grid{a, b};
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

std::vector<std::size_t> parse_sizes(const std::string& list) {
  std::vector<std::size_t> out;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      out.push_back(std::stoul(item));
    } catch (const std::exception&) {
      throw InvalidArgument("bad size list '" + list + "'");
    }
  }
  return out;
}

std::vector<std::string> split(const std::string& list) {
  std::vector<std::string> out;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(item);
  return out;
}

NodeSet generate(const std::string& kind, std::size_t size) {
  if (kind == "fibonacci") return gen_fibonacci(size);
  if (kind == "icosahedral") return gen_icosahedral(static_cast<int>(size));
  throw InvalidArgument("unknown node kind '" + kind + "'");
}

// --- option holders -------------------------------------------------------

struct NodesGen {
  std::string kind = "icosahedral";
  int level = -1;
  std::size_t n = 0;
  std::string out;
};

struct NodesStats {
  std::string file;
  std::size_t probe = 0;
};

struct LagrangeOpts {
  std::string nodes;
  int m = 2;
  std::size_t center = 0;
  std::string out;
  std::string grid = "400x200";
};

struct BuildOpts {
  std::string nodes;
  int m = 2;
  double M = 7.0;
  std::size_t n = 0;
  double radius_k = 0.0;
  bool grow = false;
  std::string format = "binary";
  std::string out;
};

struct SolveOpts {
  std::string nodes;
  std::string basis;
  std::string data;
  int m = 2;
  double tol = 1e-6;
  std::size_t maxit = 200;
  std::string x0 = "data";
  std::string out;
  std::string report;
  std::string history;
};

struct EvalOpts {
  std::string nodes;
  std::string coeffs;
  std::string at = "grid:300x600";
  std::string out;
};

struct GramOpts {
  double r = 0.0;
  std::string nodes;
  std::string cap_center = "0,90";
};

struct DecayOpts {
  std::string nodes;
  int m = 2;
  std::size_t center = 0;
  std::string grid = "400x200";
  double floor = 1e-10;
  std::string out;
  std::string script;
};

struct ConvergenceOpts {
  std::string nodes;
  std::string kind = "fibonacci";
  std::string sizes = "400,1600,6400";
  std::string field = "exp_z";
  int m = 2;
  double M = 7.0;
  std::size_t probe = 20000;
  std::string out;
};

struct Table1Opts {
  std::string nodes;
  std::string kind = "fibonacci";
  std::string sizes = "400,900,1600,2500";
  int m = 2;
  std::string grid = "400x200";
  std::string out;
};

DecayStudyOptions decay_options(const std::string& grid, double floor) {
  const auto g = parse_grid(grid);
  if (!g) throw InvalidArgument("bad grid '" + grid + "', expected LONxLAT such as 400x200");
  DecayStudyOptions o;
  o.n_lon = g->first;
  o.n_lat = g->second;
  o.fit.plateau_floor = floor;
  return o;
}

// --- commands ---------------------------------------------------------------

void cmd_nodes_gen(const NodesGen& o, std::ostream& out) {
  NodeSet set;
  if (o.kind == "icosahedral") {
    if (o.level < 0) throw InvalidArgument("nodes gen --kind icosahedral needs --level");
    set = gen_icosahedral(o.level);
  } else if (o.kind == "fibonacci") {
    if (o.n == 0) throw InvalidArgument("nodes gen --kind fibonacci needs --n");
    set = gen_fibonacci(o.n);
  } else {
    throw InvalidArgument("unknown node kind '" + o.kind + "'");
  }
  save_nodes(set, o.out);
  out << "N," << set.size() << '\n';
}

void cmd_nodes_stats(const NodesStats& o, const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const NodeSet set = load(o.file, err);
  const std::size_t probe = o.probe ? o.probe : default_probe_count(set.size());
  const MeshStats s = mesh_stats(set, probe);
  print_header(out, cfg);
  out << "N,h,q,rho,n_probe\n";
  out << set.size() << ',' << fmt(s.h) << ',' << fmt(s.q) << ',' << fmt(s.rho) << ',' << s.n_probe << '\n';
}

void cmd_lagrange(const LagrangeOpts& o, const RunConfig& cfg, std::ostream& err) {
  const NodeSet set = load(o.nodes, err);
  const KernelSpec spec(o.m);
  if (o.center >= set.size()) throw InvalidArgument("--center-idx out of range");
  const DecayStudyOptions dopts = decay_options(o.grid, 1e-10);
  const MeshStats stats = mesh_stats(set);
  const SaddleSolution col = lagrange_column(set, spec, o.center);
  const KernelExpansion chi(spec, set, col.a, col.c);
  const auto bands = band_maxima([&](std::span<const SpherePoint> xs) { return chi.eval(xs); },
                                 set[o.center], dopts.n_lon, dopts.n_lat);

  CsvFile f(o.out, cfg);
  f.row("# h=%.10g q=%.10g\n", stats.h, stats.q);
  f.row("kind,index,t,abs_value\n");
  for (std::size_t i = 0; i < bands.size(); ++i) {
    const double theta = (static_cast<double>(i) + 0.5) * std::numbers::pi / static_cast<double>(dopts.n_lat);
    f.row("function,%zu,%.10g,%.10g\n", i, theta / stats.h, bands[i]);
  }
  for (std::size_t z = 0; z < set.size(); ++z) {
    f.row("coefficient,%zu,%.10g,%.10g\n", z, geodesic_distance(set[o.center], set[z]) / stats.h,
          std::abs(col.a[static_cast<Eigen::Index>(z)]));
  }
  f.close();
}

void cmd_build(const BuildOpts& o, const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const NodeSet set = load(o.nodes, err);
  const KernelSpec spec(o.m);
  FootprintRule rule = FootprintRule::count(o.M);
  if (o.n > 0) rule = FootprintRule::fixed(o.n);
  if (o.radius_k > 0.0) rule = FootprintRule::radius(o.radius_k);
  LocalBasisOptions lopts;
  lopts.grow_on_failure = o.grow;
  const LocalBasis basis = build_local_basis(set, spec, rule, lopts);
  save_basis(basis, o.out, o.format == "csv" ? BasisFormat::csv : BasisFormat::binary, cfg.lines());

  std::size_t lo = set.size(), hi = 0;
  for (std::size_t k : basis.per_center_n) {
    lo = std::min(lo, k);
    hi = std::max(hi, k);
  }
  print_header(out, cfg);
  out << "N,m,mode,nnz,min_n,max_n,max_stencil_radius\n";
  out << set.size() << ',' << o.m << ',' << (rule.mode == FootprintRule::Mode::count ? "count" : "radius") << ','
      << basis.A.nnz() << ',' << lo << ',' << hi << ',' << fmt(basis.max_stencil_radius) << '\n';
}

int cmd_solve(const SolveOpts& o, const RunConfig& cfg, std::ostream& err) {
  const NodeSet set = load(o.nodes, err);
  const KernelSpec spec(o.m);
  const LocalBasis basis = load_basis(o.basis, set);
  if (basis.spec.m() != o.m) throw InvalidArgument("basis was built for m = " + std::to_string(basis.spec.m()));
  const Eigen::VectorXd f = node_data(o.data, set, cfg.seed);

  PreconditionedOptions popts;
  popts.tol = o.tol;
  popts.maxit = o.maxit;
  popts.x0 = o.x0 == "zero" ? PreconditionedOptions::InitialGuess::zero : PreconditionedOptions::InitialGuess::data;

  PreconditionedSolution sol;
  bool converged = true;
  try {
    sol = interpolate_preconditioned(set, spec, basis, f, popts);
  } catch (const NotConverged& e) {
    sol = e.best();
    converged = false;
  }

  write_coefficients(o.out, {sol.a, sol.c}, cfg);
  if (!o.report.empty()) {
    std::size_t n_max = 0;
    for (std::size_t k : basis.per_center_n) n_max = std::max(n_max, k);
    CsvFile r(o.report, cfg);
    r.row("N,n,tol,maxit,iterations,converged,breakdown,final_relres,interp_residual\n");
    r.row("%zu,%zu,%.3g,%zu,%zu,%d,%d,%.6e,%.6e\n", set.size(), n_max, o.tol, o.maxit, sol.report.iterations,
          converged ? 1 : 0, sol.report.breakdown ? 1 : 0, sol.report.final_relres, sol.interp_residual);
    r.close();
  }
  if (!o.history.empty()) {
    CsvFile h(o.history, cfg);
    h.row("iteration,relres_estimate\n");
    for (std::size_t k = 0; k < sol.report.residual_history.size(); ++k) {
      h.row("%zu,%.6e\n", k, sol.report.residual_history[k]);
    }
    h.close();
  }
  if (!converged) {
    err << "error: GMRES did not reach tol " << o.tol << " in " << o.maxit << " iterations (relres "
        << sol.report.final_relres << "); best iterate written\n";
    return kExitDomain;
  }
  return kExitOk;
}

void cmd_eval(const EvalOpts& o, const RunConfig& cfg, std::ostream& err) {
  const NodeSet set = load(o.nodes, err);
  const Coefficients coeffs = read_coefficients(o.coeffs);
  if (static_cast<std::size_t>(coeffs.a.size()) != set.size()) {
    throw InvalidArgument("coefficient file has " + std::to_string(coeffs.a.size()) + " kernel terms for " +
                          std::to_string(set.size()) + " nodes");
  }
  const auto m = static_cast<int>(std::lround(std::sqrt(static_cast<double>(coeffs.c.size()))));
  if (m < 1 || static_cast<Eigen::Index>(m * m) != coeffs.c.size()) {
    throw InvalidArgument("coefficient file must hold m^2 harmonic terms");
  }
  const KernelSpec spec(m);
  const KernelExpansion s(spec, set, coeffs.a, coeffs.c);

  if (o.at.rfind("grid:", 0) == 0) {
    // grid:300x600 is 300 latitudes by 600 longitudes.
    const auto parsed = parse_grid(o.at.substr(5));
    if (!parsed) throw InvalidArgument("bad grid '" + o.at + "', expected grid:LATxLON");
    const std::size_t n_lat = parsed->first;
    const std::size_t n_lon = parsed->second;
    std::vector<SpherePoint> pts;
    std::vector<std::pair<double, double>> ll;
    pts.reserve(n_lat * n_lon);
    for (std::size_t i = 0; i < n_lat; ++i) {
      const double lat = -90.0 + (static_cast<double>(i) + 0.5) * 180.0 / static_cast<double>(n_lat);
      for (std::size_t j = 0; j < n_lon; ++j) {
        const double lon = -180.0 + static_cast<double>(j) * 360.0 / static_cast<double>(n_lon);
        pts.push_back(SpherePoint::from_lonlat(lon * kDeg, lat * kDeg));
        ll.emplace_back(lon, lat);
      }
    }
    const Eigen::VectorXd v = s.eval(pts);
    CsvFile f(o.out, cfg);
    f.row("lon_deg,lat_deg,value\n");
    for (std::size_t k = 0; k < pts.size(); ++k) {
      f.row("%.10g,%.10g,%.17g\n", ll[k].first, ll[k].second, v[static_cast<Eigen::Index>(k)]);
    }
    f.close();
    return;
  }
  const NodeSet at = load(o.at, err);
  const Eigen::VectorXd v = s.eval(at.points());
  CsvFile f(o.out, cfg);
  f.row("x,y,z,value\n");
  for (std::size_t k = 0; k < at.size(); ++k) {
    f.row("%.17g,%.17g,%.17g,%.17g\n", at[k].x, at[k].y, at[k].z, v[static_cast<Eigen::Index>(k)]);
  }
  f.close();
}

void cmd_gram(const GramOpts& o, const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const CapGramAnalytic g = cap_gram_analytic(o.r);
  print_header(out, cfg);
  out << "field,i,j,value\n";
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) out << "G," << i << ',' << j << ',' << fmt(g.G(i, j)) << '\n';
  }
  out << "lambda_min_normalized,,," << fmt(g.lambda_min_normalized()) << '\n';
  out << "asymptotic_ratio,,," << fmt(g.asymptotic_ratio()) << '\n';
  if (o.nodes.empty()) return;

  const NodeSet set = load(o.nodes, err);
  const auto parts = split(o.cap_center);
  if (parts.size() != 2) throw InvalidArgument("--cap-center expects LON,LAT in degrees");
  double lon = 0.0, lat = 0.0;
  try {
    lon = std::stod(parts[0]);
    lat = std::stod(parts[1]);
  } catch (const std::exception&) {
    throw InvalidArgument("--cap-center expects LON,LAT in degrees");
  }
  const SpherePoint center = SpherePoint::from_lonlat(lon * kDeg, lat * kDeg);
  const NeighborIndex index(set);
  const auto inside = index.ball(center, o.r);
  const GramCompareReport rep = cap_gram_compare(set, inside, center, o.r);
  out << "n_points,,," << rep.n_points << '\n';
  out << "norm_inv_discrete,,," << fmt(rep.norm_inv_discrete) << '\n';
  out << "bound,,," << fmt(rep.bound) << '\n';
  out << "hc_over_r,,," << fmt(rep.hc_over_r) << '\n';
  out << "status,,," << to_string(rep.status) << '\n';
}

void cmd_decay(const DecayOpts& o, const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const NodeSet set = load(o.nodes, err);
  const DecayStudy st = decay_study(set, KernelSpec(o.m), o.center, decay_options(o.grid, o.floor));

  CsvFile f(o.out, cfg);
  f.row("kind,t,abs_value\n");
  for (const auto& s : st.function_samples) f.row("function,%.10g,%.10g\n", s.t, s.value);
  for (const auto& s : st.coefficient_samples) f.row("coefficient,%.10g,%.10g\n", s.t, s.value);
  f.close();

  print_header(out, cfg);
  out << "# h=" << fmt(st.stats.h) << " q=" << fmt(st.stats.q) << '\n';
  out << "kind,nu,C,t_min,t_max,r2,q_power,n_used,plateau_fraction\n";
  for (const DecayFit* fit : {&st.function_fit, &st.coefficient_fit}) {
    out << to_string(fit->kind) << ',' << fmt(fit->nu) << ',' << fmt(fit->C) << ',' << fmt(fit->t_min) << ','
        << fmt(fit->t_max) << ',' << fmt(fit->r2) << ',' << fit->q_power << ',' << fit->n_used << ','
        << fmt(fit->plateau_fraction) << '\n';
  }

  if (!o.script.empty()) {
    std::ofstream s(o.script);
    if (!s) throw Error("cannot write " + o.script);
    const double qn = std::pow(st.stats.q, -st.coefficient_fit.q_power);
    s << "set datafile separator ','\nset logscale y\nset xlabel 'distance / h'\n"
      << "plot '" << o.out << "' using ($1 eq 'function' ? $2 : 1/0):3 title 'band max |chi|', \\\n"
      << "     '' using ($1 eq 'coefficient' ? $2 : 1/0):($3*" << fmt(qn) << ") title '|A| q^" << -st.coefficient_fit.q_power
      << "', \\\n"
      << "     " << fmt(st.function_fit.C) << "*exp(-" << fmt(st.function_fit.nu) << "*x) title 'fit (function)', \\\n"
      << "     " << fmt(st.coefficient_fit.C) << "*exp(-" << fmt(st.coefficient_fit.nu)
      << "*x) title 'fit (coefficient)'\n";
  }
}

std::vector<NodeSet> study_sets(const std::string& nodes, const std::string& kind, const std::string& sizes,
                                std::vector<std::string>& labels, std::ostream& err) {
  std::vector<NodeSet> sets;
  if (!nodes.empty()) {
    for (const auto& p : split(nodes)) {
      sets.push_back(load(p, err));
      labels.push_back(p);
    }
    return sets;
  }
  for (std::size_t n : parse_sizes(sizes)) {
    sets.push_back(generate(kind, n));
    labels.push_back(kind + ":" + std::to_string(n));
  }
  return sets;
}

void cmd_convergence(const ConvergenceOpts& o, const RunConfig& cfg, std::ostream& err) {
  const auto field = named_field(o.field);
  if (!field) throw InvalidArgument("unknown field '" + o.field + "' (exp_z, linear, gaussian)");
  std::vector<std::string> labels;
  const auto sets = study_sets(o.nodes, o.kind, o.sizes, labels, err);
  ConvergenceOptions copts;
  copts.probe_n = o.probe;
  copts.footprint = FootprintRule::count(o.M);
  const auto rows = convergence_study(sets, KernelSpec(o.m), *field, copts);

  CsvFile f(o.out, cfg);
  f.row("N,h,interp_error,quasi_error,interp_order,quasi_order,gmres_iterations\n");
  for (const auto& r : rows) {
    f.row("%zu,%.10g,%.6e,%.6e,%s,%s,%zu\n", r.n_nodes, r.h, r.interp_error, r.quasi_error,
          r.interp_order ? fmt(*r.interp_order).c_str() : "", r.quasi_order ? fmt(*r.quasi_order).c_str() : "",
          r.gmres_iterations);
  }
  f.close();
}

void cmd_table1(const Table1Opts& o, const RunConfig& cfg, std::ostream& err) {
  std::vector<std::string> labels;
  const auto sets = study_sets(o.nodes, o.kind, o.sizes, labels, err);
  const DecayStudyOptions dopts = decay_options(o.grid, 1e-10);
  CsvFile f(o.out, cfg);
  f.row("label,N,h,rho,nu_L,C_L,nu_c,C_c,r2_L,r2_c\n");
  for (std::size_t i = 0; i < sets.size(); ++i) {
    const Table1Row r = table1_row(labels[i], sets[i], KernelSpec(o.m), 0, dopts);
    f.row("%s,%zu,%.6g,%.6g,%.6g,%.6g,%.6g,%.6g,%.4f,%.4f\n", r.label.c_str(), r.n_nodes, r.stats.h, r.stats.rho,
          r.function_fit.nu, r.function_fit.C, r.coefficient_fit.nu, r.coefficient_fit.C, r.function_fit.r2,
          r.coefficient_fit.r2);
  }
  f.close();
}

std::string join_args(int argc, const char* const* argv) {
  std::string s = "spherelag";
  for (int i = 1; i < argc; ++i) {
    s += ' ';
    s += argv[i];
  }
  return s;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Local Lagrange bases and preconditioned kernel interpolation on the sphere", "spherelag"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(SPHERELAG_VERSION));

  std::size_t threads = 0;
  unsigned long long seed = 0;
  app.add_option("--threads", threads, "Worker threads (default: SPHERELAG_THREADS or all cores)");
  app.add_option("--seed", seed, "Seed for random data");

  // nodes
  auto* nodes = app.add_subcommand("nodes", "Generate node sets or report mesh statistics");
  nodes->require_subcommand(1);
  NodesGen ng;
  auto* gen = nodes->add_subcommand("gen", "Write a generated node set");
  gen->add_option("--kind", ng.kind, "icosahedral or fibonacci")->check(CLI::IsMember({"icosahedral", "fibonacci"}));
  gen->add_option("--level", ng.level, "Icosahedral refinement level");
  gen->add_option("--n", ng.n, "Fibonacci point count");
  gen->add_option("--out", ng.out, "Output node file")->required();
  NodesStats ns;
  auto* stats = nodes->add_subcommand("stats", "Mesh norm, separation radius and mesh ratio as CSV");
  stats->add_option("file", ns.file, "Node file")->required();
  stats->add_option("--probe", ns.probe, "Probe points for the mesh norm (default max(100 N, 1e5))");

  // lagrange
  LagrangeOpts lo;
  auto* lag = app.add_subcommand("lagrange", "Decay samples of one full Lagrange function");
  lag->add_option("--nodes", lo.nodes)->required();
  lag->add_option("--m", lo.m)->check(CLI::Range(1, 6));
  lag->add_option("--center-idx", lo.center)->required();
  lag->add_option("--out-csv", lo.out)->required();
  lag->add_option("--grid", lo.grid, "Band probe grid LONxLAT");

  // build
  BuildOpts bo;
  auto* build = app.add_subcommand("build", "Build the local Lagrange basis");
  build->add_option("--nodes", bo.nodes)->required();
  build->add_option("--m", bo.m)->check(CLI::Range(1, 6));
  auto* opt_M = build->add_option("--M", bo.M, "Count-mode multiplier of ceil(log10(N)^2)");
  auto* opt_n = build->add_option("--n", bo.n, "Fixed stencil size");
  auto* opt_k = build->add_option("--radius-K", bo.radius_k, "Radius mode, r = K h log(1/h)");
  opt_M->excludes(opt_n)->excludes(opt_k);
  opt_n->excludes(opt_k);
  build->add_flag("--grow-on-failure", bo.grow, "Retry singular stencils once with double size");
  build->add_option("--format", bo.format)->check(CLI::IsMember({"binary", "csv"}));
  build->add_option("--out", bo.out)->required();

  // solve
  SolveOpts so;
  auto* solve = app.add_subcommand("solve", "Preconditioned GMRES interpolation");
  solve->add_option("--nodes", so.nodes)->required();
  solve->add_option("--basis", so.basis)->required();
  solve->add_option("--data", so.data, "FILE, 'random', or field:NAME")->required();
  solve->add_option("--m", so.m)->check(CLI::Range(1, 6));
  solve->add_option("--tol", so.tol)->check(CLI::PositiveNumber);
  solve->add_option("--maxit", so.maxit);
  solve->add_option("--x0", so.x0)->check(CLI::IsMember({"data", "zero"}));
  solve->add_option("--out", so.out)->required();
  solve->add_option("--report", so.report);
  solve->add_option("--history", so.history);

  // eval
  EvalOpts eo;
  auto* eval = app.add_subcommand("eval", "Evaluate an interpolant on a lon-lat grid or points");
  eval->add_option("--nodes", eo.nodes)->required();
  eval->add_option("--coeffs", eo.coeffs)->required();
  eval->add_option("--at", eo.at, "grid:LATxLON or a node file");
  eval->add_option("--out", eo.out)->required();

  // gram
  GramOpts go;
  auto* gram = app.add_subcommand("gram", "Cap Gram matrix and the discrete comparison");
  gram->add_option("--r", go.r)->required();
  gram->add_option("--nodes", go.nodes);
  gram->add_option("--cap-center", go.cap_center, "LON,LAT in degrees");

  // study
  auto* study = app.add_subcommand("study", "Decay, convergence and decay-table studies");
  study->require_subcommand(1);
  DecayOpts dop;
  auto* decay = study->add_subcommand("decay", "Decay samples and fits for one center");
  decay->add_option("--nodes", dop.nodes)->required();
  decay->add_option("--m", dop.m)->check(CLI::Range(1, 6));
  decay->add_option("--center-idx", dop.center);
  decay->add_option("--grid", dop.grid, "Band probe grid LONxLAT");
  decay->add_option("--floor", dop.floor, "Plateau floor");
  decay->add_option("--out", dop.out)->required();
  decay->add_option("--script", dop.script, "Also write a gnuplot script");
  ConvergenceOpts cop;
  auto* conv = study->add_subcommand("convergence", "Interpolation and quasi-interpolation errors");
  conv->add_option("--nodes", cop.nodes, "Comma-separated node files");
  conv->add_option("--kind", cop.kind)->check(CLI::IsMember({"icosahedral", "fibonacci"}));
  conv->add_option("--sizes", cop.sizes, "Comma-separated N (fibonacci) or levels (icosahedral)");
  conv->add_option("--field", cop.field)->check(CLI::IsMember({"exp_z", "linear", "gaussian"}));
  conv->add_option("--m", cop.m)->check(CLI::Range(1, 6));
  conv->add_option("--M", cop.M);
  conv->add_option("--probe", cop.probe);
  conv->add_option("--out", cop.out)->required();
  Table1Opts to;
  auto* table1 = study->add_subcommand("table1", "Decay constants for a list of node sets");
  table1->add_option("--nodes", to.nodes, "Comma-separated node files");
  table1->add_option("--kind", to.kind)->check(CLI::IsMember({"icosahedral", "fibonacci"}));
  table1->add_option("--sizes", to.sizes);
  table1->add_option("--m", to.m)->check(CLI::Range(1, 6));
  table1->add_option("--grid", to.grid);
  table1->add_option("--out", to.out)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }

  if (threads > 0) set_thread_count(threads);
  const RunConfig cfg{join_args(argc, argv), seed, SPHERELAG_VERSION};

  try {
    if (*gen) cmd_nodes_gen(ng, out);
    else if (*stats) cmd_nodes_stats(ns, cfg, out, err);
    else if (*lag) cmd_lagrange(lo, cfg, err);
    else if (*build) cmd_build(bo, cfg, out, err);
    else if (*solve) return cmd_solve(so, cfg, err);
    else if (*eval) cmd_eval(eo, cfg, err);
    else if (*gram) cmd_gram(go, cfg, out, err);
    else if (*decay) cmd_decay(dop, cfg, out, err);
    else if (*conv) cmd_convergence(cop, cfg, err);
    else if (*table1) cmd_table1(to, cfg, err);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitDomain;
  }
  return kExitOk;
}

}  // namespace spherelag::cli

// Runs the acceptance criteria and prints one PASS/FAIL line per criterion.
// Exit status is 0 only if every criterion passes.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "spherelag/diagnostics.hpp"
#include "spherelag/gmres.hpp"
#include "spherelag/gramstudy.hpp"
#include "spherelag/lagrange.hpp"
#include "spherelag/locallag.hpp"

using namespace spherelag;

namespace {

struct Outcome {
  bool pass = true;
  std::vector<std::string> notes;

  void check(bool ok, const std::string& what) {
    pass = pass && ok;
    notes.push_back(std::string(ok ? "ok   " : "FAIL ") + what);
  }
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

Eigen::VectorXd uniform_data(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Eigen::VectorXd v(static_cast<Eigen::Index>(n));
  for (auto& x : v) x = u(rng);
  return v;
}

// Criterion 1: preconditioned GMRES iteration counts on icosahedral sets.
Outcome gmres_iterations() {
  Outcome o;
  const KernelSpec k(2);
  std::vector<std::size_t> iters_1e6;
  // No power-of-two icosahedral refinement has 23042 nodes; the third size uses
  // the Fibonacci lattice.
  for (int level : {4, 5, 6}) {
    const NodeSet s = level < 6 ? gen_icosahedral(level) : gen_fibonacci(23042);
    const auto t0 = std::chrono::steady_clock::now();
    const LocalBasis b = build_local_basis(s, k, FootprintRule::count());
    const Eigen::VectorXd f = uniform_data(s.size(), 0);
    const std::vector<double> tols = level < 6 ? std::vector<double>{1e-6, 1e-8} : std::vector<double>{1e-6};
    for (double tol : tols) {
      PreconditionedOptions opt;
      opt.tol = tol;
      std::size_t it = 0;
      bool conv = false;
      try {
        const auto sol = interpolate_preconditioned(s, k, b, f, opt);
        it = sol.report.iterations;
        conv = sol.report.converged;
      } catch (const NotConverged& e) {
        it = e.best().report.iterations;
      }
      const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      if (tol == 1e-6) iters_1e6.push_back(it);
      const std::string what = fmt("N=%zu n=%zu tol=%.0e: %zu iterations, converged=%d (%.1f s)", s.size(),
                                   b.per_center_n[0], tol, it, conv ? 1 : 0, secs);
      if (level < 6) {
        o.check(conv && it <= 15, what + " [<= 15]");
      } else {
        o.check(conv, what + (s.size() > KernelOperator::kDefaultMaterializeCap ? " K on the fly" : ""));
      }
    }
  }
  const auto [lo, hi] = std::minmax_element(iters_1e6.begin(), iters_1e6.end());
  o.check(*lo > 0 && static_cast<double>(*hi) / static_cast<double>(*lo) <= 3.0,
          fmt("tol 1e-6 iterations over N = 2562, 10242, 23042: max/min = %zu/%zu [<= 3]", *hi, *lo));
  return o;
}

// Criterion 2: footprint table.
Outcome footprint_table() {
  Outcome o;
  const std::size_t N[] = {2562, 10242, 23042, 40962, 92162, 163842};
  const std::size_t want[] = {84, 119, 140, 154, 175, 196};
  for (int i = 0; i < 6; ++i) {
    const std::size_t got = default_footprint(N[i]);
    o.check(got == want[i], fmt("default_footprint(%zu) = %zu [== %zu]", N[i], got, want[i]));
  }
  return o;
}

// Criterion 3: decay rates and symmetry of the coefficient matrix.
Outcome lagrange_decay() {
  Outcome o;
  NodeSet s = gen_fibonacci(2500);
  s.set_stats(mesh_stats(s));
  const DecayStudy d = decay_study(s, KernelSpec(2), 1250);
  const double nl = d.function_fit.nu, nc = d.coefficient_fit.nu;
  o.check(nl >= 0.8, fmt("Fibonacci N=2500 nu_L = %.3f (r2 %.4f) [>= 0.8]", nl, d.function_fit.r2));
  o.check(nc >= 0.8, fmt("Fibonacci N=2500 nu_c = %.3f (r2 %.4f) [>= 0.8]", nc, d.coefficient_fit.r2));
  const double rel = std::abs(nl - nc) / std::max(nl, nc);
  o.check(rel <= 0.3, fmt("|nu_L - nu_c| / max = %.3f [<= 0.3]", rel));
  o.check(d.function_fit.plateau_fraction > 0.0,
          fmt("function values reach the 1e-10 plateau (fraction %.2f of bands)", d.function_fit.plateau_fraction));

  if (const char* me = std::getenv("SPHERELAG_ME2500")) {
    NodeSet w = load_nodes(me).nodes;
    const DecayStudy dw = decay_study(w, KernelSpec(2), 0);
    o.check(std::abs(dw.function_fit.nu - 1.33) <= 0.15,
            fmt("minimal-energy N=%zu nu_L = %.3f [1.33 +- 0.15]", w.size(), dw.function_fit.nu));
  } else {
    o.notes.push_back("skip minimal-energy check (SPHERELAG_ME2500 not set)");
  }

  for (std::size_t n : {100u, 400u}) {
    const LagrangeBasis b = full_lagrange(gen_fibonacci(n), KernelSpec(2));
    const double sym = (b.A - b.A.transpose()).cwiseAbs().maxCoeff() / b.A.cwiseAbs().maxCoeff();
    o.check(sym <= 1e-6, fmt("N=%zu ||A - A^T||max / ||A||max = %.2e [<= 1e-6]", n, sym));
  }
  return o;
}

// Criterion 4: cap Gram asymptotics and the comparison inequality.
Outcome gram_asymptotics() {
  Outcome o;
  const double r05 = cap_gram_analytic(0.05).asymptotic_ratio();
  const double r01 = cap_gram_analytic(0.01).asymptotic_ratio();
  o.check(r05 >= 0.95 && r05 <= 1.05, fmt("r=0.05 ratio %.6f [0.95, 1.05]", r05));
  o.check(r01 >= 0.99 && r01 <= 1.01, fmt("r=0.01 ratio %.6f [0.99, 1.01]", r01));

  auto compare = [&](const std::string& label, const NodeSet& s, const std::vector<std::size_t>& idx,
                     const SpherePoint& c, double r) {
    const GramCompareReport rep = cap_gram_compare(s, idx, c, r);
    const bool dense = rep.hc_over_r <= kGramHypothesisRatio;
    o.check(dense && rep.status == GramComparison::holds,
            fmt("%s: #C=%zu h_C/r=%.3f ||G_C^-1||=%.4g <= bound %.4g", label.c_str(), rep.n_points,
                rep.hc_over_r, rep.norm_inv_discrete, rep.bound));
  };
  for (double r : {0.05, 0.2}) {
    const SpherePoint c = SpherePoint::from_lonlat(0.7, 0.3);
    const NodeSet s = cap_fibonacci(c, r, 1500);
    std::vector<std::size_t> idx(s.size());
    std::iota(idx.begin(), idx.end(), 0);
    compare(fmt("cap Fibonacci r=%.2f", r), s, idx, c, r);
  }
  {
    const NodeSet ico = gen_icosahedral(6);
    const SpherePoint c = SpherePoint::from_lonlat(-2.0, 0.9);
    const NeighborIndex index(ico);
    compare("icosahedral N=40962 in cap r=0.3", ico, index.ball(c, 0.3), c, 0.3);
  }
  {
    std::mt19937_64 rng(4);
    const SpherePoint c = SpherePoint::from_lonlat(1.0, -0.5);
    std::vector<SpherePoint> pts;
    while (pts.size() < 4000) {
      const SpherePoint p = oracle::random_point(rng);
      if (geodesic_distance(p, c) <= 0.1) pts.push_back(p);
    }
    std::vector<std::size_t> idx(pts.size());
    std::iota(idx.begin(), idx.end(), 0);
    compare("random uniform in cap r=0.1", NodeSet(pts), idx, c, 0.1);
  }
  return o;
}

// Max over centers and probes of |chi_local - chi_full|, both evaluated from
// one probe-by-node kernel matrix.
double local_full_distance(const LagrangeBasis& full, const LocalBasis& local, const Eigen::MatrixXd& E,
                           const Eigen::MatrixXd& P) {
  const Eigen::MatrixXd diffA = local.A.to_dense() - full.A;
  const Eigen::MatrixXd diffC = local.C - full.C;
  return (E * diffA + P * diffC).cwiseAbs().maxCoeff();
}

// Criterion 5: local against full Lagrange functions.
Outcome local_full() {
  Outcome o;
  const KernelSpec k(2);
  {
    const NodeSet s = gen_fibonacci(400);
    const LagrangeBasis full = full_lagrange(s, k);
    const LocalBasis local = build_local_basis(s, k, FootprintRule::fixed(400));
    const auto probes = probe_points(20 * s.size());
    const Eigen::MatrixXd E = kernel_eval_matrix(k, s, probes);
    Eigen::MatrixXd P(static_cast<Eigen::Index>(probes.size()), 4);
    for (std::size_t i = 0; i < probes.size(); ++i) P.row(static_cast<Eigen::Index>(i)) = k.harmonics().eval(probes[i]).transpose();
    const double dA = (local.A.to_dense() - full.A).cwiseAbs().maxCoeff();
    const double dC = (local.C - full.C).cwiseAbs().maxCoeff();
    const double dv = local_full_distance(full, local, E, P);
    o.check(dv <= 1e-8, fmt("N=400 footprint=N: max |chi_local - chi| = %.2e (coef diff A %.1e, C %.1e) [<= 1e-8]",
                            dv, dA, dC));
  }
  {
    const NodeSet s = gen_fibonacci(900);
    const LagrangeBasis full = full_lagrange(s, k);
    const auto probes = probe_points(20 * s.size());
    const Eigen::MatrixXd E = kernel_eval_matrix(k, s, probes);
    Eigen::MatrixXd P(static_cast<Eigen::Index>(probes.size()), 4);
    for (std::size_t i = 0; i < probes.size(); ++i) P.row(static_cast<Eigen::Index>(i)) = k.harmonics().eval(probes[i]).transpose();
    std::vector<double> dist;
    for (double M : {7.0, 14.0, 28.0}) {
      const LocalBasis local = build_local_basis(s, k, FootprintRule::count(M));
      dist.push_back(local_full_distance(full, local, E, P));
      if (M == 7.0) {
        o.check(dist.back() <= 1e-2, fmt("N=900 default footprint n=%zu: max_xi ||chi_local - chi||inf = %.3e [<= 1e-2]",
                                         local.per_center_n[0], dist.back()));
      } else {
        o.check(dist.back() < dist[dist.size() - 2],
                fmt("N=900 M=%.0f n=%zu: %.3e [< previous %.3e]", M, local.per_center_n[0], dist.back(),
                    dist[dist.size() - 2]));
      }
    }
  }
  return o;
}

// Criterion 6: interpolation and quasi-interpolation orders for exp(z).
Outcome approximation_orders() {
  Outcome o;
  std::vector<NodeSet> sets;
  for (std::size_t n : {400u, 1600u, 6400u}) sets.push_back(gen_fibonacci(n));
  ConvergenceOptions opt;
  opt.probe_n = 40000;
  const auto rows =
      convergence_study(sets, KernelSpec(2), [](const SpherePoint& p) { return std::exp(p.z); }, opt);
  for (const auto& r : rows) {
    o.notes.push_back(fmt("N=%zu h=%.4f interp %.3e quasi %.3e gmres its %zu", r.n_nodes, r.h, r.interp_error,
                          r.quasi_error, r.gmres_iterations));
  }
  for (std::size_t i = 1; i < rows.size(); ++i) {
    o.check(*rows[i].interp_order >= 3.0,
            fmt("interpolation order %zu -> %zu: %.2f [>= 3]", rows[i - 1].n_nodes, rows[i].n_nodes, *rows[i].interp_order));
  }
  for (const auto& r : rows) {
    o.check(r.quasi_error <= 10.0 * r.interp_error,
            fmt("N=%zu quasi/interp = %.3g [<= 10]", r.n_nodes, r.quasi_error / r.interp_error));
  }
  return o;
}

// Criterion 7: property suites.
Outcome properties() {
  Outcome o;
  {
    const NodeSet s = oracle::random_points(5000, 77);
    const NeighborIndex index(s);
    std::size_t bad_knn = 0, bad_ball = 0;
    std::mt19937_64 rng(78);
    for (std::size_t c = 0; c < s.size(); ++c) {
      if (index.knn(c, 20) != oracle::knn(s, s[c], 20)) ++bad_knn;
    }
    for (int t = 0; t < 500; ++t) {
      const SpherePoint p = oracle::random_point(rng);
      const double r = 0.01 + 0.3 * std::uniform_real_distribution<double>(0, 1)(rng);
      if (index.ball(p, r) != oracle::ball(s, p, r)) ++bad_ball;
    }
    o.check(bad_knn == 0 && bad_ball == 0,
            fmt("kNN (all 5000 centers, k=20) and 500 ball queries equal brute force: %zu/%zu mismatches", bad_knn,
                bad_ball));
  }
  {
    double worst = 0.0;
    for (int m : {2, 3, 4}) {
      const KernelSpec k(m);
      const NodeSet s = oracle::random_points(200, 80 + static_cast<std::uint64_t>(m));
      SaddleSystem sys = assemble_saddle(k, s);
      const HarmonicBasis harm = k.harmonics();
      const auto probes = probe_points(500);
      for (std::size_t j = 0; j < harm.size(); ++j) {
        Eigen::VectorXd rhs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(s.size() + harm.size()));
        for (std::size_t i = 0; i < s.size(); ++i) rhs[static_cast<Eigen::Index>(i)] = harm.eval(s[i])[static_cast<Eigen::Index>(j)];
        const SaddleSolution sol = factor_solve(sys, rhs);
        const KernelExpansion e(k, s, sol.a, sol.c);
        for (const auto& p : probes) worst = std::max(worst, std::abs(e(p) - harm.eval(p)[static_cast<Eigen::Index>(j)]));
      }
    }
    o.check(worst <= 1e-8, fmt("saddle solves reproduce harmonics of degree < m (m=2,3,4): %.2e [<= 1e-8]", worst));
  }
  {
    double worst = std::numeric_limits<double>::infinity();
    for (int m : {2, 3}) {
      const KernelSpec k(m);
      for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const NodeSet s = oracle::random_points(60, 200 + seed);
        const Eigen::MatrixXd K = kernel_matrix(k, s);
        const Eigen::MatrixXd phi = k.harmonics().sample(s);
        const Eigen::MatrixXd q = phi.householderQr().householderQ() * Eigen::MatrixXd::Identity(60, phi.cols());
        std::mt19937_64 rng(seed);
        std::normal_distribution<double> g;
        for (int t = 0; t < 50; ++t) {
          Eigen::VectorXd a(60);
          for (auto& v : a) v = g(rng);
          a -= q * (q.transpose() * a);
          worst = std::min(worst, a.dot(K * a) / a.squaredNorm());
        }
      }
    }
    o.check(worst > 1e-12, fmt("CPD: min a^T K a / |a|^2 over constrained random vectors = %.3e [> 1e-12]", worst));
  }
  {
    bool ok = true;
    std::size_t worst_it = 0;
    for (int n : {5, 20, 60}) {
      Eigen::VectorXd d(n), b(n);
      for (int i = 0; i < n; ++i) {
        d[i] = 1.0 + i;
        b[i] = 1.0;
      }
      const LinearOperator op = [&](const Eigen::VectorXd& x, Eigen::VectorXd& y) { y = d.cwiseProduct(x); };
      const GmresResult r = gmres(op, {}, b, Eigen::VectorXd::Zero(n), {1e-10, static_cast<std::size_t>(n)});
      ok = ok && r.report.converged && r.report.iterations <= static_cast<std::size_t>(n) &&
           (r.x - b.cwiseQuotient(d)).cwiseAbs().maxCoeff() <= 1e-8;
      worst_it = std::max(worst_it, r.report.iterations);
    }
    o.check(ok, fmt("GMRES converges within n steps on diagonal systems (n = 5, 20, 60; max its %zu)", worst_it));
  }
  {
    const NodeSet s = gen_icosahedral(4);
    const KernelSpec k(2);
    const LocalBasis b = build_local_basis(s, k, FootprintRule::count());
    const HarmonicBasis harm = k.harmonics();
    double worst = 0.0, moment = 0.0;
    for (std::size_t xi = 0; xi < s.size(); ++xi) {
      const auto rows = b.stencil(xi);
      const auto vals = b.A.column_values(xi);
      Eigen::VectorXd mom = Eigen::VectorXd::Zero(4);
      for (std::size_t t = 0; t < rows.size(); ++t) mom += vals[t] * harm.eval(s[rows[t]]);
      moment = std::max(moment, mom.cwiseAbs().maxCoeff());
      for (std::size_t z : rows) {
        double v = harm.eval(s[z]).dot(b.C.col(static_cast<Eigen::Index>(xi)));
        for (std::size_t t = 0; t < rows.size(); ++t) v += vals[t] * k(s[z].dot(s[rows[t]]));
        worst = std::max(worst, std::abs(v - (z == xi ? 1.0 : 0.0)));
      }
    }
    o.check(worst <= 1e-8, fmt("every local column of N=2562, n=84 cardinal on its stencil: %.2e [<= 1e-8]", worst));
    o.notes.push_back(fmt("max moment |sum A phi_j| over columns: %.2e", moment));
  }
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {"1 GMRES iteration counts", gmres_iterations},
      {"2 footprint rule", footprint_table},
      {"3 Lagrange decay and symmetry", lagrange_decay},
      {"4 Gram asymptotics and comparison", gram_asymptotics},
      {"5 local/full basis consistency", local_full},
      {"6 approximation orders", approximation_orders},
      {"7 property suites", properties},
  };
  std::vector<std::pair<std::string, bool>> summary;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.check(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("criterion %s (%.1f s)\n", c.name, secs);
    for (const auto& n : o.notes) std::printf("    %s\n", n.c_str());
    std::fflush(stdout);
    summary.emplace_back(c.name, o.pass);
  }
  std::printf("\n");
  int failed = 0;
  for (const auto& [name, pass] : summary) {
    std::printf("%s criterion %s\n", pass ? "PASS" : "FAIL", name.c_str());
    failed += pass ? 0 : 1;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(summary.size()) - failed, summary.size());
  return failed == 0 ? 0 : 1;
}

#include <benchmark/benchmark.h>

#include <cmath>

#include "spherelag/geom.hpp"
#include "spherelag/kernel.hpp"
#include "spherelag/locallag.hpp"
#include "spherelag/neighbors.hpp"

using namespace spherelag;

static void BM_KernelEval(benchmark::State& state) {
  const KernelSpec k(static_cast<int>(state.range(0)));
  const auto pts = probe_points(4096);
  double acc = 0.0;
  for (auto _ : state) {
    for (std::size_t i = 1; i < pts.size(); ++i) acc += k(pts[i].dot(pts[i - 1]));
    benchmark::DoNotOptimize(acc);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long long>(pts.size() - 1));
}
BENCHMARK(BM_KernelEval)->Arg(2)->Arg(3);

static void BM_Harmonics(benchmark::State& state) {
  const HarmonicBasis h(static_cast<int>(state.range(0)));
  const auto pts = probe_points(1024);
  std::vector<double> out(h.size());
  for (auto _ : state) {
    for (const auto& p : pts) h.eval(p, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * 1024);
}
BENCHMARK(BM_Harmonics)->Arg(1)->Arg(4);

static void BM_Knn(benchmark::State& state) {
  const NodeSet s = gen_icosahedral(5);
  const NeighborIndex idx(s);
  std::size_t c = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(idx.knn(c, static_cast<std::size_t>(state.range(0))));
    c = (c + 97) % s.size();
  }
}
BENCHMARK(BM_Knn)->Arg(84)->Arg(168);

static void BM_LocalBasisBuild(benchmark::State& state) {
  const NodeSet s = gen_icosahedral(static_cast<int>(state.range(0)));
  const KernelSpec k(2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(build_local_basis(s, k, FootprintRule::count()));
  }
  state.counters["N"] = static_cast<double>(s.size());
}
BENCHMARK(BM_LocalBasisBuild)->Arg(3)->Arg(4)->Unit(benchmark::kMillisecond);

static void BM_KernelMatvec(benchmark::State& state) {
  const NodeSet s = gen_icosahedral(4);
  const KernelSpec k(2);
  const KernelOperator op(s, k, state.range(0) ? KernelOperator::kDefaultMaterializeCap : 0);
  const Eigen::VectorXd v = Eigen::VectorXd::LinSpaced(static_cast<Eigen::Index>(s.size()), -1, 1);
  Eigen::VectorXd out(v.size());
  for (auto _ : state) {
    op.apply(v, out);
    benchmark::DoNotOptimize(out.data());
  }
}
BENCHMARK(BM_KernelMatvec)->Arg(1)->Arg(0)->Unit(benchmark::kMillisecond);

static void BM_PreconditionedSolve(benchmark::State& state) {
  const NodeSet s = gen_icosahedral(4);
  const KernelSpec k(2);
  const LocalBasis b = build_local_basis(s, k, FootprintRule::count());
  Eigen::VectorXd f(static_cast<Eigen::Index>(s.size()));
  for (std::size_t i = 0; i < s.size(); ++i) f[static_cast<Eigen::Index>(i)] = std::exp(s[i].z);
  for (auto _ : state) {
    benchmark::DoNotOptimize(interpolate_preconditioned(s, k, b, f));
  }
}
BENCHMARK(BM_PreconditionedSolve)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();

#include <benchmark/benchmark.h>

#include "gahf/config.hpp"

using namespace gahf;

namespace {

struct Setup {
  InitialDataSet ids;
  DomainGrid dom;
};

Setup pg_setup(int dim, double h) {
  Box b;
  b.lo = Vec3(-4, -4, dim == 3 ? -4 : 0);
  b.hi = -b.lo;
  InitialDataSet ids = InitialDataSet::from_family(AnalyticFamily::painleve_gullstrand(1.0), dim, b);
  DomainGrid dom = build_domain(ids, Shape::sphere(3), Shape::sphere(1), h);
  return {std::move(ids), std::move(dom)};
}

GraphSolution bowl(const DomainGrid& dom, double t) {
  GraphSolution s;
  s.t = t;
  s.eps = 0.05;
  s.u.assign(dom.grid.node_count(), 0.0);
  s.boundary.assign(s.u.size(), -0.1 / t);
  for (std::size_t n : dom.interior) s.u[n] = -0.05 * dom.grid.position(n).squaredNorm();
  return s;
}

void BM_Residual(benchmark::State& state) {
  const Setup s = pg_setup(static_cast<int>(state.range(0)), state.range(0) == 2 ? 0.05 : 0.2);
  const JangOperator op(s.ids, s.dom, OperatorMode::Generalized);
  GraphSolution u = bowl(s.dom, 0.1);
  op.fill_ghosts(u);
  for (auto _ : state) benchmark::DoNotOptimize(op.residual(u));
  state.counters["dofs"] = static_cast<double>(op.dof_count());
}
BENCHMARK(BM_Residual)->Arg(2)->Arg(3)->Unit(benchmark::kMillisecond);

void BM_Jacobian(benchmark::State& state) {
  const Setup s = pg_setup(static_cast<int>(state.range(0)), state.range(0) == 2 ? 0.05 : 0.2);
  const JangOperator op(s.ids, s.dom, OperatorMode::Generalized);
  GraphSolution u = bowl(s.dom, 0.1);
  op.fill_ghosts(u);
  for (auto _ : state) benchmark::DoNotOptimize(op.linearize(u));
  state.counters["dofs"] = static_cast<double>(op.dof_count());
}
BENCHMARK(BM_Jacobian)->Arg(2)->Arg(3)->Unit(benchmark::kMillisecond);

void BM_ExtractSphere(benchmark::State& state) {
  const int dim = static_cast<int>(state.range(0));
  const CartesianGrid grid = grid_for(Shape::sphere(3), dim, dim == 2 ? 0.025 : 0.1);
  Field f(grid.node_count());
  for (std::size_t n = 0; n < f.size(); ++n) f[n] = grid.position(n).norm() - 2.0;
  for (auto _ : state) benchmark::DoNotOptimize(extract_isosurface(grid, f));
}
BENCHMARK(BM_ExtractSphere)->Arg(2)->Arg(3)->Unit(benchmark::kMillisecond);

void BM_Hausdorff(benchmark::State& state) {
  const CartesianGrid grid = grid_for(Shape::sphere(3), 3, 0.1);
  Field f(grid.node_count()), g(grid.node_count());
  for (std::size_t n = 0; n < f.size(); ++n) {
    f[n] = grid.position(n).norm() - 2.0;
    g[n] = (grid.position(n) - Vec3(0.05, 0, 0)).norm() - 2.0;
  }
  const SurfaceMesh a = extract_isosurface(grid, f), c = extract_isosurface(grid, g);
  for (auto _ : state) benchmark::DoNotOptimize(hausdorff_distance(a, c));
}
BENCHMARK(BM_Hausdorff)->Unit(benchmark::kMillisecond);

void BM_OracleRoot(benchmark::State& state) {
  const AnalyticFamily f = AnalyticFamily::painleve_gullstrand(1.0);
  for (auto _ : state) benchmark::DoNotOptimize(horizon_radius(f, 3, HorizonMode::Generalized));
}
BENCHMARK(BM_OracleRoot);

void BM_FindHorizon2D(benchmark::State& state) {
  RunConfig c;
  c.family = "pg";
  c.dim = 2;
  c.outer_radius = 6;
  c.inner = {Ball{1.0, Vec3::Zero()}};
  c.h = 0.1;
  const InitialDataSet ids = make_data(c);
  const DomainGrid base = make_domain(c, ids);
  const FinderOptions opt = finder_options(c);
  for (auto _ : state) benchmark::DoNotOptimize(find_horizon(ids, base, opt));
}
BENCHMARK(BM_FindHorizon2D)->Unit(benchmark::kSecond)->Iterations(1);

}  // namespace

BENCHMARK_MAIN();

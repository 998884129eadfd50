#include <benchmark/benchmark.h>

#include "rfk/fem.hpp"
#include "rfk/geometry.hpp"
#include "rfk/parallels.hpp"
#include "rfk/radial.hpp"

namespace {

using namespace rfk;

const geometry::DomainSpec& eccentric() {
  static const geometry::DomainSpec d(geometry::StarBoundary::circle({0.3, 0.0}, 1.0),
                                      geometry::StarBoundary::circle({}, 2.0));
  return d;
}

void BM_RadialEigenvalue(benchmark::State& state) {
  const RobinParam h = state.range(0) == 0 ? RobinParam::dirichlet() : RobinParam::finite(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(radial::lambda1_radial({1.0, 2.0, h, h}).lambda1);
}
BENCHMARK(BM_RadialEigenvalue)->Arg(1)->Arg(-1)->Arg(0)->Unit(benchmark::kMillisecond);

void BM_BuildMesh(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(fem::build_mesh(eccentric(), 4 * n, n).nodes.size());
}
BENCHMARK(BM_BuildMesh)->Arg(16)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_Assemble(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const fem::Mesh mesh = fem::build_mesh(eccentric(), 4 * n, n);
  for (auto _ : state) benchmark::DoNotOptimize(fem::assemble_components(mesh).stiffness.nonZeros());
}
BENCHMARK(BM_Assemble)->Arg(16)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_SmallestEigenvalue(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const fem::Mesh mesh = fem::build_mesh(eccentric(), 4 * n, n);
  const RobinPair robin{RobinParam::finite(1.0), RobinParam::finite(1.0)};
  for (auto _ : state) benchmark::DoNotOptimize(fem::solve(mesh, robin).lambda1);
  state.counters["nodes"] = static_cast<double>(mesh.nodes.size());
}
BENCHMARK(BM_SmallestEigenvalue)->Arg(16)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_LevelLengths(benchmark::State& state) {
  parallels::ProfileOptions o;
  o.resolution = static_cast<int>(state.range(0));
  o.workers = 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(parallels::level_lengths(eccentric(), geometry::Side::Inner, o).delta_star);
  }
}
BENCHMARK(BM_LevelLengths)->Arg(256)->Arg(512)->Arg(1024)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();

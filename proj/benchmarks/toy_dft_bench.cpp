#include <benchmark/benchmark.h>

#include <cmath>

#include "hkpoly/toy_dft.hpp"

using namespace hkpoly;

namespace {

GridSystem box(int points) {
  GridSystem sys;
  sys.box_length = 1.0;
  sys.points = points;
  sys.n_particles = 1;
  sys.external_potential.assign(points, 0.0);
  return sys;
}

void BM_GroundStateBox(benchmark::State& state) {
  const GridSystem sys = box(int(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(solve_system(sys, 1e-10));
}
BENCHMARK(BM_GroundStateBox)->Arg(128)->Arg(256)->Arg(512)->Unit(benchmark::kMillisecond);

void BM_GroundStatePair(benchmark::State& state) {
  GridSystem sys;
  sys.box_length = 8.0;
  sys.points = int(state.range(0));
  sys.n_particles = 2;
  sys.statistics = Statistics::antisymmetric;
  sys.interaction_softening = 1.0;
  sys.external_potential.assign(sys.points, 0.0);
  for (int k = 0; k < sys.points; ++k) {
    const double x = sys.node(k) - 4.0;
    sys.external_potential[k] = -2.0 / std::sqrt(x * x + 1.0);
  }
  for (auto _ : state) benchmark::DoNotOptimize(solve_system(sys, 1e-9));
}
BENCHMARK(BM_GroundStatePair)->Arg(24)->Arg(48)->Unit(benchmark::kMillisecond);

}  // namespace

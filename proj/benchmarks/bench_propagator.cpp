#include <benchmark/benchmark.h>

#include "bouncelab/propagator.hpp"

using namespace bouncelab;

namespace {

// Driven split steps on a power-of-two grid with the cesium box aspect ratio.
void BM_SplitStep(benchmark::State& state) {
  auto p = PhysicalParams::gravitational();
  p.omega = 1.0;
  p.lambda = 0.05;
  const auto h = Hamiltonian::from(p, WallMode::hard);
  const Grid g{static_cast<std::size_t>(state.range(0)), 0.0, 420.0};
  auto s = init_gaussian(70.0, 0.0, 1.0, g);
  SplitStepPropagator prop(h, g, PropagationPlan::for_drive(h, 1.0, 256));
  for (auto _ : state) prop.step(s);
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SplitStep)->RangeMultiplier(2)->Range(1024, 16384);

void BM_Autocorrelation(benchmark::State& state) {
  const Grid g{static_cast<std::size_t>(state.range(0)), 0.0, 420.0};
  const auto a = init_gaussian(70.0, 0.0, 1.0, g);
  const auto b = init_gaussian(71.0, 0.3, 1.0, g);
  for (auto _ : state) benchmark::DoNotOptimize(inner_product(a, b));
}
BENCHMARK(BM_Autocorrelation)->Arg(4096);

}  // namespace

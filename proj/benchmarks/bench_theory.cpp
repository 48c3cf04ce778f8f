#include <benchmark/benchmark.h>

#include "bouncelab/config.hpp"
#include "bouncelab/perturbation.hpp"
#include "bouncelab/secular.hpp"

using namespace bouncelab;

namespace {

PhysicalParams driven() {
  PhysicalParams p = RunConfig{}.params;
  p.lambda = 0.05 * p.gravity / (p.omega * p.omega);
  return p;
}

void BM_MathieuCharA(benchmark::State& state) {
  const double q = static_cast<double>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(mathieu_char_a(15.6, q, 1e4));
}
BENCHMARK(BM_MathieuCharA)->Arg(1)->Arg(10)->Arg(100);

void BM_StarkDirect(benchmark::State& state) {
  const auto p = driven();
  for (auto _ : state) benchmark::DoNotOptimize(stark_shift_direct(176.5, p));
}
BENCHMARK(BM_StarkDirect);

void BM_StarkSemiclassical(benchmark::State& state) {
  const auto p = driven();
  for (auto _ : state) benchmark::DoNotOptimize(stark_shift_semiclassical(176.5, p));
}
BENCHMARK(BM_StarkSemiclassical);

void BM_SecularRevival(benchmark::State& state) {
  const auto p = driven();
  SecularOptions o;
  o.q_cap = 1e4;
  for (auto _ : state) benchmark::DoNotOptimize(revival_time_secular(176.5, p, o));
}
BENCHMARK(BM_SecularRevival);

}  // namespace

#include <benchmark/benchmark.h>

#include <random>

#include "lazysynth/closedloop.hpp"
#include "lazysynth/synthesis.hpp"
#include "lazysynth/systems.hpp"

using namespace lazysynth;

/* DC-DC at eta1 = 0.00125; argument = number of layers */
static void BM_dcdc_lazy(benchmark::State& state) {
  const SafetyProblem p = dcdc_problem(0.00125, static_cast<int>(state.range(0)));
  for (auto _ : state) {
    auto r = lazy_safe(p);
    benchmark::DoNotOptimize(r.winning.count());
  }
}
BENCHMARK(BM_dcdc_lazy)->DenseRange(1, 4)->Unit(benchmark::kMillisecond);

static void BM_dcdc_eager(benchmark::State& state) {
  const SafetyProblem p = dcdc_problem(0.00125, static_cast<int>(state.range(0)));
  for (auto _ : state) {
    auto r = eager_safe(p);
    benchmark::DoNotOptimize(r.winning.count());
  }
}
BENCHMARK(BM_dcdc_eager)->DenseRange(1, 4)->Unit(benchmark::kMillisecond);

/* full-resolution converter, lazy, L = 1 and L = 6 */
static void BM_dcdc_full(benchmark::State& state) {
  const SafetyProblem p = dcdc_problem(0.0005, static_cast<int>(state.range(0)));
  for (auto _ : state) {
    auto r = lazy_safe(p, {}, 0);
    benchmark::DoNotOptimize(r.winning.count());
  }
}
BENCHMARK(BM_dcdc_full)->Arg(1)->Arg(6)->Unit(benchmark::kMillisecond)->Iterations(1);

static void BM_spiral_lazy(benchmark::State& state) {
  const SafetyProblem p = spiral_problem(3);
  for (auto _ : state) {
    auto r = lazy_safe(p);
    benchmark::DoNotOptimize(r.winning.count());
  }
}
BENCHMARK(BM_spiral_lazy)->Unit(benchmark::kMillisecond);

/* abstraction of every layer-1 cell, argument = worker threads */
static void BM_explore_layer1(benchmark::State& state) {
  const SafetyProblem p = dcdc_problem(0.00125, 1);
  ReachTransitionSource src(p.system, p.stack, p.substeps);
  for (auto _ : state) {
    TransitionCache cache(p.stack, 2);
    cache.set_threads(static_cast<unsigned>(state.range(0)));
    benchmark::DoNotOptimize(cache.explore(src, p.stack.full_set(1)));
  }
}
BENCHMARK(BM_explore_layer1)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

static void BM_gamma_coarsen(benchmark::State& state) {
  const LayerStack s({0.0, 0.0}, {1.0, 1.0}, {1.0 / 1024, 1.0 / 1024}, 0.1, 6);
  CellSet a = s.empty_set(1);
  std::mt19937_64 rng(1);
  std::bernoulli_distribution b(0.9);
  for (std::size_t c = 0; c < a.size(); ++c) {
    if (b(rng)) a.set(c);
  }
  for (auto _ : state) benchmark::DoNotOptimize(gamma(s, a, 6).count());
}
BENCHMARK(BM_gamma_coarsen)->Unit(benchmark::kMicrosecond);

static void BM_closed_loop_step(benchmark::State& state) {
  const SafetyProblem p = dcdc_problem(0.00125, 3);
  const auto r = lazy_safe(p);
  const QuantizerView view(r.controller, p.stack);
  std::mt19937_64 rng(3);
  Vector x = sample_winning_state(p.stack, r.winning, rng);
  for (auto _ : state) {
    x = step(view, p.system, x, rng, p.substeps).state;
  }
}
BENCHMARK(BM_closed_loop_step);

BENCHMARK_MAIN();

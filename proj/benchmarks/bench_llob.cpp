#include <benchmark/benchmark.h>

#include "llob/book_pde.hpp"
#include "llob/manipulation.hpp"
#include "llob/price_solver.hpp"
#include "llob/relaxation.hpp"
#include "llob/schedule.hpp"

using namespace llob;

static void BM_SolveA(benchmark::State& state) {
  const double r = static_cast<double>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(solve_A(r));
}
BENCHMARK(BM_SolveA)->Arg(1)->Arg(100);

static void BM_MarchConstantRate(benchmark::State& state) {
  const auto s = TradingSchedule::constant(1.0, 1.0);
  const SolverConfig c{.dt = 1.0 / static_cast<double>(state.range(0))};
  for (auto _ : state) benchmark::DoNotOptimize(solve_price_path(s, ModelParams{}, c));
}
BENCHMARK(BM_MarchConstantRate)->Arg(250)->Arg(500)->Arg(1000)->Unit(benchmark::kMillisecond);

static void BM_EvolveBook(benchmark::State& state) {
  const ModelParams p;
  const auto s = TradingSchedule::constant(1.0, 1.0);
  const auto init = linear_book(default_grid(s, p, static_cast<std::size_t>(state.range(0))), p);
  PdeConfig c;
  c.dt = 1e-3;
  for (auto _ : state) benchmark::DoNotOptimize(evolve_book(init, s, p, c));
}
BENCHMARK(BM_EvolveBook)->Arg(1001)->Arg(2001)->Unit(benchmark::kMillisecond);

static void BM_KernelMatrix(benchmark::State& state) {
  const ModelParams p;
  const auto s = TradingSchedule::buy_then_sell(1.0, 1.0);
  const auto path = solve_price_path(s, p, {.dt = 2.0 / static_cast<double>(state.range(0))});
  for (auto _ : state) benchmark::DoNotOptimize(kernel_matrix(path, p));
}
BENCHMARK(BM_KernelMatrix)->Arg(50)->Arg(100)->Unit(benchmark::kMillisecond);

static void BM_DecayPoint(benchmark::State& state) {
  const std::vector<double> ts{2.0};
  for (auto _ : state) benchmark::DoNotOptimize(decay_trajectory(10.0, 1.0, ts, ModelParams{}));
}
BENCHMARK(BM_DecayPoint);

BENCHMARK_MAIN();

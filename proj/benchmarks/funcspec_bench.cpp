#include <benchmark/benchmark.h>

#include "salvage/expr.hpp"

using namespace salvage;

static void BM_Parse(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(parse_expr("(1 + z*x)*phi(x) - 2*x^3 + exp(-x^2)/3", {{"z", 2.0}}));
}
BENCHMARK(BM_Parse);

static void BM_Eval(benchmark::State& state) {
  const Expr e = parse_expr("(1 + 2*x)*phi(x) - 2*x^3 + exp(-x^2)/3");
  double x = 0.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(e.eval(x));
    x += 1e-6;
  }
}
BENCHMARK(BM_Eval);

static void BM_Derivative(benchmark::State& state) {
  const Expr e = parse_expr("(1 + 2*x)*phi(x) - 2*x^3 + exp(-x^2)/3");
  for (auto _ : state) benchmark::DoNotOptimize(e.derivative());
}
BENCHMARK(BM_Derivative);

BENCHMARK_MAIN();

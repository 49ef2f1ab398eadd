#include <benchmark/benchmark.h>

#include "csdk/config.hpp"
#include "csdk/csd.hpp"
#include "csdk/polar.hpp"
#include "csdk/serial.hpp"
#include "csdk/testgen.hpp"

using namespace csdk;

namespace {

void BM_MatmulParallel(benchmark::State& state) {
  const index_t n = state.range(0);
  testgen::Rng rng(1);
  const Matrix a = testgen::complex_gaussian(n, n, rng);
  const Matrix b = testgen::complex_gaussian(n, n, rng);
  for (auto _ : state) benchmark::DoNotOptimize(matmul(a, b, Op::adjoint, Op::none));
  state.counters["threads"] = thread_limit();
}

void BM_MatmulSerial(benchmark::State& state) {
  const index_t n = state.range(0);
  testgen::Rng rng(1);
  const Matrix a = testgen::complex_gaussian(n, n, rng);
  const Matrix b = testgen::complex_gaussian(n, n, rng);
  for (auto _ : state) benchmark::DoNotOptimize(serial::matmul(a, b, Op::adjoint, Op::none));
}

void BM_Polar(benchmark::State& state) {
  const auto method = static_cast<PolarMethod>(state.range(1));
  testgen::Rng rng(2);
  const Matrix a = testgen::complex_gaussian(state.range(0), state.range(0), rng);
  for (auto _ : state) benchmark::DoNotOptimize(polar(a, method));
  state.SetLabel(to_string(method));
}

void BM_Csd(benchmark::State& state) {
  const index_t n = state.range(0);
  const auto method = static_cast<PolarMethod>(state.range(1));
  const Matrix a = testgen::generate({2, false, n, 1});
  CsdOptions opts;
  opts.polar_method = method;
  for (auto _ : state) benchmark::DoNotOptimize(csd(a, n, opts));
  state.SetLabel(to_string(method));
}

}  // namespace

BENCHMARK(BM_MatmulParallel)->Arg(64)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_MatmulSerial)->Arg(64)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Polar)->ArgsProduct({{60, 120}, {0, 1, 2}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Csd)->ArgsProduct({{30, 60, 120}, {0, 1, 2}})->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();

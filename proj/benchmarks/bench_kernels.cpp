#include <benchmark/benchmark.h>

#include "deltanls/nls.hpp"
#include "deltanls/norms.hpp"
#include "deltanls/propagators.hpp"
#include "deltanls/transforms.hpp"

using namespace deltanls;

namespace {

WaveField bench_field(int n) {
  return gaussian_field(make_grid(n, 40.0), 0.5, 1.0, -3.0);
}

void BM_fourier_round_trip(benchmark::State& state) {
  const WaveField f = bench_field(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(from_fourier(to_fourier(f)));
  }
}
BENCHMARK(BM_fourier_round_trip)->Arg(1024)->Arg(4096)->Arg(16384);

void BM_free_propagate(benchmark::State& state) {
  const WaveField f = bench_field(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(free_propagate(f, 0.5));
  }
}
BENCHMARK(BM_free_propagate)->Arg(4096)->Arg(16384);

void BM_exp_kernel_convolve(benchmark::State& state) {
  const WaveField f = bench_field(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(exp_kernel_convolve(f, 1.0));
  }
}
BENCHMARK(BM_exp_kernel_convolve)->Arg(4096)->Arg(16384);

void BM_delta_propagate(benchmark::State& state) {
  const WaveField f = bench_field(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(delta_propagate(f, 1.0, 0.5));
  }
}
BENCHMARK(BM_delta_propagate)->Arg(4096)->Arg(16384);

void BM_cn_propagate(benchmark::State& state) {
  const WaveField f = bench_field(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(cn_propagate(f, 1.0, 0.5, 64));
  }
}
BENCHMARK(BM_cn_propagate)->Arg(4096)->Arg(16384);

void BM_strang_step_exact(benchmark::State& state) {
  const WaveField f = bench_field(static_cast<int>(state.range(0)));
  const NLSParams p{1.0, 5.0};
  for (auto _ : state) {
    benchmark::DoNotOptimize(strang_step(f, 1e-3, p, {}));
  }
}
BENCHMARK(BM_strang_step_exact)->Arg(4096)->Arg(16384);

void BM_strang_step_cayley(benchmark::State& state) {
  const WaveField f = bench_field(static_cast<int>(state.range(0)));
  const NLSParams p{1.0, 5.0};
  const PropagatorMethod cn{PropagatorKind::CrankNicolson, 1};
  for (auto _ : state) {
    benchmark::DoNotOptimize(strang_step(f, 1e-3, p, cn));
  }
}
BENCHMARK(BM_strang_step_cayley)->Arg(4096)->Arg(16384);

void BM_h1_norm(benchmark::State& state) {
  const WaveField f = bench_field(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(h1_norm(f));
  }
}
BENCHMARK(BM_h1_norm)->Arg(4096)->Arg(16384);

}  // namespace

BENCHMARK_MAIN();

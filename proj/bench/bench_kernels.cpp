// Serial reference kernels against the OpenMP versions. Thread count follows
// OMP_NUM_THREADS; compare a run with 1 against a run with the core count.

#include <benchmark/benchmark.h>
#include <omp.h>

#include <random>

#include "psfest/kernels.hpp"

using namespace psfest;

namespace {

std::vector<cdouble> random_complex(std::size_t n) {
  std::mt19937_64 gen(n);
  std::normal_distribution<double> g;
  std::vector<cdouble> v(n);
  for (auto& x : v) x = {g(gen), g(gen)};
  return v;
}

LatticeSignal random_signal(const Box& b, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> v(b.cells());
  for (auto& x : v) x = u(gen);
  return LatticeSignal(b, v);
}

void BM_dft_reference(benchmark::State& state) {
  const std::int64_t m = state.range(0);
  const std::vector<std::int64_t> dims{m, m};
  const auto data = random_complex(static_cast<std::size_t>(m * m));
  for (auto _ : state) benchmark::DoNotOptimize(reference::dft_nd(data, dims, -1));
  state.SetItemsProcessed(state.iterations() * m * m);
}

void BM_fft_parallel(benchmark::State& state) {
  const std::int64_t m = state.range(0);
  const std::vector<std::int64_t> dims{m, m};
  const auto data = random_complex(static_cast<std::size_t>(m * m));
  std::vector<cdouble> work;
  for (auto _ : state) {
    work = data;
    kernels::fft_nd(work, dims, -1);
    benchmark::DoNotOptimize(work.data());
  }
  state.SetItemsProcessed(state.iterations() * m * m);
  state.counters["threads"] = omp_get_max_threads();
}

// image side x kernel side, as in a blur of one observation
void BM_convolve_reference(benchmark::State& state) {
  const auto x = random_signal(Box::cube(2, 0, state.range(0) - 1), 1);
  const auto k = random_signal(Box::cube(2, -state.range(1) / 2, state.range(1) / 2), 2);
  for (auto _ : state) benchmark::DoNotOptimize(reference::convolve(k, x));
}

void BM_convolve_direct_parallel(benchmark::State& state) {
  const auto x = random_signal(Box::cube(2, 0, state.range(0) - 1), 1);
  const auto k = random_signal(Box::cube(2, -state.range(1) / 2, state.range(1) / 2), 2);
  for (auto _ : state) benchmark::DoNotOptimize(kernels::convolve_direct(k, x));
  state.counters["threads"] = omp_get_max_threads();
}

void BM_convolve_fft_parallel(benchmark::State& state) {
  const auto x = random_signal(Box::cube(2, 0, state.range(0) - 1), 1);
  const auto k = random_signal(Box::cube(2, -state.range(1) / 2, state.range(1) / 2), 2);
  for (auto _ : state) benchmark::DoNotOptimize(kernels::convolve_fft(k, x));
  state.counters["threads"] = omp_get_max_threads();
}

}  // namespace

BENCHMARK(BM_dft_reference)->Arg(16)->Arg(32)->Arg(48)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_fft_parallel)->Arg(16)->Arg(32)->Arg(48)->Arg(165)->Arg(512)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_convolve_reference)->Args({32, 51})->Args({128, 51})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_convolve_direct_parallel)->Args({32, 51})->Args({128, 51})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_convolve_fft_parallel)->Args({32, 51})->Args({128, 51})->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();

#include <benchmark/benchmark.h>

#include <random>

#include "pilotwave/permanent.hpp"

using namespace pilotwave;

namespace {

ComplexMatrix random_matrix(std::size_t n) {
  std::mt19937_64 rng(n);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  ComplexMatrix a(n);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c) a(r, c) = Complex(u(rng), u(rng));
  return a;
}

void BM_Glynn(benchmark::State& state) {
  const auto a = random_matrix(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(permanent(a, 1));
}

void BM_RyserGray(benchmark::State& state) {
  const auto a = random_matrix(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(permanent_ryser(a, 1));
}

void BM_RyserDirect(benchmark::State& state) {
  const auto a = random_matrix(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(permanent_ryser_direct(a));
}

// value plus all N row-replaced permanents, as used for the many-body gradient
void BM_RowReplacements(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto a = random_matrix(n);
  const auto b = random_matrix(n + 1);
  ComplexMatrix bn(n);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c) bn(r, c) = b(r, c);
  for (auto _ : state) benchmark::DoNotOptimize(permanent_with_row_replacements(a, bn, 1));
}

}  // namespace

BENCHMARK(BM_Glynn)->DenseRange(8, 20, 4)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_RyserGray)->DenseRange(8, 20, 4)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_RyserDirect)->DenseRange(8, 16, 4)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_RowReplacements)->DenseRange(8, 20, 4)->Unit(benchmark::kMillisecond);

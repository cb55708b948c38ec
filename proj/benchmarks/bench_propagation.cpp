#include <benchmark/benchmark.h>

#include <vector>

#include "pilotwave/bohm.hpp"
#include "pilotwave/classical.hpp"
#include "pilotwave/tdse.hpp"

using namespace pilotwave;

namespace {

void BM_CrankNicolsonStep(benchmark::State& state) {
  const Grid1D g(-40.0, 40.0, static_cast<std::size_t>(state.range(0)));
  PropagatorOptions o;
  o.stencil = state.range(1) ? LaplacianStencil::Numerov : LaplacianStencil::ThreePoint;
  const PropagatorCN p(g, 1e-3, PotentialSpec::linear(2.0), 1.0, 1.0, o);
  const auto wf = make_gaussian({1.0, -15.0, 10.0}, g);
  std::vector<Complex> psi(wf.amplitudes().begin(), wf.amplitudes().end());
  for (auto _ : state) {
    p.step_inplace(psi);
    benchmark::ClobberMemory();
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_ClassicalStep(benchmark::State& state) {
  const Grid1D g(-40.0, 40.0, static_cast<std::size_t>(state.range(0)));
  const ClassicalPropagator p(g, 5e-3, PotentialSpec::linear(2.0));
  const auto wf = make_gaussian({1.0, -15.0, 4.0}, g);
  std::vector<Complex> psi(wf.amplitudes().begin(), wf.amplitudes().end());
  for (auto _ : state) {
    p.step_inplace(psi);
    benchmark::ClobberMemory();
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_VelocityField(benchmark::State& state) {
  const Grid1D g(-40.0, 40.0, 4096);
  const auto wf = make_gaussian({1.0, 0.0, 3.0}, g);
  double x = -2.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(velocity_field(wf, x));
    x = x > 2.0 ? -2.0 : x + 1e-3;
  }
}

}  // namespace

BENCHMARK(BM_CrankNicolsonStep)->ArgsProduct({{1024, 4096, 16384}, {0, 1}});
BENCHMARK(BM_ClassicalStep)->Arg(1024)->Arg(4096);
BENCHMARK(BM_VelocityField);

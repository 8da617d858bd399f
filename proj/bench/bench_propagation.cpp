#include <benchmark/benchmark.h>

#include "tleak/dynamics.hpp"
#include "tleak/gaussian.hpp"
#include "tleak/model.hpp"
#include "tleak/propagate.hpp"
#include "tleak/qpwalk.hpp"

using namespace tleak;

namespace {

constexpr double kMu = 0.03;
constexpr double kDt = 0.015;

Eigen::MatrixXcd start_columns(int n) {
  const ModeBasis basis = tetron_mode_basis({n, 0.5, 0.5}, 0.0);
  return basis.full_vectors().topLeftCorner(2 * n, n);
}

void BM_StepKernel(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const ChainGenerator gen = ChainGenerator::build({n, 0.5, 0.5});
  Eigen::MatrixXcd w = start_columns(n);
  for (auto _ : state) {
    propagate_columns(w, gen, kMu, kDt);
    benchmark::DoNotOptimize(w.data());
  }
}

void BM_StepKernelSerial(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const ChainGenerator gen = ChainGenerator::build({n, 0.5, 0.5});
  Eigen::MatrixXcd w = start_columns(n);
  for (auto _ : state) {
    propagate_columns_serial(w, gen, kMu, kDt);
    benchmark::DoNotOptimize(w.data());
  }
}

void BM_StepReference(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const ChainParams params{n, 0.5, 0.5};
  const ModeBasis basis = tetron_mode_basis(params, 0.0);
  CorrelationMatrix g = rotate_to_site_basis(ground_state_qp_correlation(n, QubitState::plus), basis);
  const BdGMatrix h = build_tetron_bdg(params, kMu);
  for (auto _ : state) {
    propagate_correlation_reference(g, h, kDt);
    benchmark::DoNotOptimize(g.entries.data());
  }
}

void BM_Ramp(benchmark::State& state) {
  SteppingPolicy policy;
  policy.propagator = state.range(1) ? Propagator::reference : Propagator::kernel;
  const ChainParams params{static_cast<int>(state.range(0)), 0.5, 0.5};
  const RampProtocol protocol{0.0, kMu, 1e-2};
  for (auto _ : state) {
    auto r = evolve_ramp(params, protocol, policy, {protocol.duration()});
    benchmark::DoNotOptimize(r.data());
  }
}

void BM_Walk(benchmark::State& state) {
  const WalkConfig config{100, 20000, 7};
  for (auto _ : state) {
    auto r = state.range(0) ? simulate_pair_walks(config) : simulate_pair_walks_serial(config);
    benchmark::DoNotOptimize(r);
  }
}

}  // namespace

BENCHMARK(BM_StepKernel)->Arg(10)->Arg(40)->Arg(100);
BENCHMARK(BM_StepKernelSerial)->Arg(10)->Arg(40)->Arg(100);
BENCHMARK(BM_StepReference)->Arg(10)->Arg(40)->Arg(100);
BENCHMARK(BM_Ramp)->Args({40, 0})->Args({40, 1})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Walk)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();

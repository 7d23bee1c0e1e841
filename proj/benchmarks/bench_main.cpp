#include <benchmark/benchmark.h>

#include "shuttlesim/disorder.hpp"
#include "shuttlesim/lindblad.hpp"
#include "shuttlesim/phonon.hpp"
#include "shuttlesim/transfer.hpp"

namespace {

using namespace shuttlesim;

void BM_GaussianLine(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  KernelSpec k{56.4 * 56.4, 14.0};
  for (auto _ : state) {
    benchmark::DoNotOptimize(sample_gaussian_line(n, 2.8, k, 42));
  }
}
BENCHMARK(BM_GaussianLine)->Arg(512)->Arg(2048)->Arg(8192);

void BM_DenseCovariance(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  PointSet ps;
  for (int i = 0; i < n; ++i) ps.points.emplace_back(2.8 * i, 0.0);
  KernelSpec k{56.4 * 56.4, 14.0};
  for (auto _ : state) {
    benchmark::DoNotOptimize(sample_gaussian_field(ps, k, 42));
  }
}
BENCHMARK(BM_DenseCovariance)->Arg(128)->Arg(512);

void BM_LindbladStep(benchmark::State& state) {
  FivePocketModel m;
  m.eps = {0.0, 320.0, -150.0, 500.0, 260.0};
  m.t_hop = {1e-2, 1e-2, 1e-2, 1e-2};
  for (int j = 0; j < kPockets; ++j) m.delta[static_cast<std::size_t>(j)] = {40.0, 25.0};
  const SpectralTable table{PhononParams{}};
  const EigenSystem es = diagonalize(build_hamiltonian(m));
  const RateMatrix rates = compute_rates(es, table);
  Matrix10cd rho = Matrix10cd::Zero();
  rho(0, 0) = 1.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(rho = lindblad_step(rho, es, rates, 1e-2));
  }
}
BENCHMARK(BM_LindbladStep);

void BM_PausedTransfer(benchmark::State& state) {
  TransferSchedule s;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        evolve_transfer(s, {40.0, 20.0}, {-30.0, 35.0}));
  }
}
BENCHMARK(BM_PausedTransfer);

} // namespace

BENCHMARK_MAIN();

#include <random>

#include <benchmark/benchmark.h>

#include "wqc/classical.hpp"
#include "wqc/measures.hpp"
#include "wqc/quantum.hpp"

using namespace wqc;

static void BM_Trajectory(benchmark::State& state) {
  const BilliardParams p;
  for (auto _ : state) {
    auto c = classical::simulate_trajectory(p, static_cast<std::size_t>(state.range(0)), 1);
    benchmark::DoNotOptimize(c.records.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Trajectory)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

static void BM_SpikeSpectrum(benchmark::State& state) {
  const BilliardParams p;
  const auto c = classical::simulate_trajectory(p, static_cast<std::size_t>(state.range(0)), 1);
  const auto s = derive_scales(p);
  const classical::FrequencyGrid grid{0.0, 12.0 * s.DeltaL / 1500, 1501};
  for (auto _ : state) {
    auto e = classical::spike_spectrum(c, grid);
    benchmark::DoNotOptimize(e);
  }
}
BENCHMARK(BM_SpikeSpectrum)->Arg(10000)->Unit(benchmark::kMillisecond);

static void BM_Eigensolve(benchmark::State& state) {
  const BilliardParams p;
  const auto w = quantum::SpectralWindow::around(p.energy, static_cast<double>(state.range(0)), p);
  for (auto _ : state) {
    auto sol = quantum::build_and_diagonalize(w, p);
    benchmark::DoNotOptimize(sol.all_eigenvalues.data());
  }
}
BENCHMARK(BM_Eigensolve)->Arg(100)->Arg(300)->Unit(benchmark::kMillisecond);

static void BM_Network(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  std::mt19937_64 rng(1);
  std::lognormal_distribution<double> d(0, 2);
  Eigen::MatrixXd X(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) X(i, j) = X(j, i) = d(rng);
  const measures::BandWeight w(measures::BandWeight::Kind::Exponential, 15);
  for (auto _ : state) benchmark::DoNotOptimize(measures::network_average(X, w));
}
BENCHMARK(BM_Network)->Arg(200)->Arg(1000)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();

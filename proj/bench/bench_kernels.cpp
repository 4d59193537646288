// Serial reference vs OpenMP kernels on pipeline-sized inputs.
#include <benchmark/benchmark.h>

#include <cmath>
#include <random>

#include "eargaze/kernels.hpp"
#include "eargaze/synth.hpp"

using namespace eargaze;

namespace {

struct LagFixture {
  std::vector<std::vector<double>> xs, ys;
  std::vector<kernels::LagTask> tasks;

  explicit LagFixture(int count) {
    std::mt19937_64 rng(11);
    std::normal_distribution<double> noise(0.0, 0.1);
    for (int k = 0; k < count; ++k) {
      std::vector<double> x(750), y(750);
      for (std::size_t i = 0; i < x.size(); ++i) {
        x[i] = std::sin(0.05 * static_cast<double>(i) + k) + noise(rng);
        y[i] = std::sin(0.05 * static_cast<double>(i + 3) + k) + noise(rng);
      }
      xs.push_back(std::move(x));
      ys.push_back(std::move(y));
    }
    for (int k = 0; k < count; ++k) tasks.push_back({xs[k], ys[k], k % 2 ? 64 : 12});
  }
};

void lagged(benchmark::State& state, kernels::Execution exec) {
  LagFixture f(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(kernels::lagged_correlations(f.tasks, exec));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void field(benchmark::State& state, kernels::Execution exec) {
  const auto model = synth::default_head_model();
  std::vector<Point3> sites;
  for (const auto& e : model.layout.electrodes()) sites.push_back(e.position);
  const auto n = static_cast<std::size_t>(state.range(0));
  std::vector<double> h(n), v(n);
  for (std::size_t i = 0; i < n; ++i) {
    h[i] = 15.0 * std::sin(0.01 * static_cast<double>(i));
    v[i] = 10.0 * std::cos(0.013 * static_cast<double>(i));
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(kernels::dipole_field(sites, model.eye_centers, model.dipole_moment, h, v, exec));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0) * static_cast<long>(sites.size()));
}

void BM_LaggedSerial(benchmark::State& s) { lagged(s, kernels::Execution::serial); }
void BM_LaggedParallel(benchmark::State& s) { lagged(s, kernels::Execution::parallel); }
void BM_DipoleSerial(benchmark::State& s) { field(s, kernels::Execution::serial); }
void BM_DipoleParallel(benchmark::State& s) { field(s, kernels::Execution::parallel); }

}  // namespace

BENCHMARK(BM_LaggedSerial)->Arg(64)->Arg(512)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_LaggedParallel)->Arg(64)->Arg(512)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_DipoleSerial)->Arg(16000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_DipoleParallel)->Arg(16000)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();

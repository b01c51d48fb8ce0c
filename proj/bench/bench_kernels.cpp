#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "hyperfit/kernels.hpp"
#include "hyperfit/montecarlo.hpp"
#include "hyperfit/series.hpp"

using namespace hyperfit;

namespace {

struct GridInput {
  std::vector<double> tau, y, spans, alphas;
};

GridInput grid_input(std::size_t n, std::size_t nodes) {
  GridInput in;
  const double span = 1.05 * static_cast<double>(n);
  for (std::size_t k = 0; k < n; ++k) {
    in.tau.push_back(static_cast<double>(k));
    in.y.push_back(0.3 + 0.2 * span / 0.4 * std::expm1(-0.4 * std::log1p(-in.tau.back() / span)));
  }
  for (std::size_t k = 0; k < nodes; ++k) {
    const double f = static_cast<double>(k) / static_cast<double>(nodes - 1);
    in.spans.push_back(static_cast<double>(n) * std::pow(3.0, f));
    in.alphas.push_back(0.01 * std::pow(500.0, f));
  }
  return in;
}

void grid(benchmark::State& state, kernels::Execution exec) {
  const auto in = grid_input(static_cast<std::size_t>(state.range(0)), static_cast<std::size_t>(state.range(1)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(kernels::singularity_grid(in.tau, in.y, in.spans, in.alphas, {}, exec));
  }
  state.counters["threads"] = exec == kernels::Execution::parallel ? kernels::max_threads() : 1;
}

void BM_GridSerial(benchmark::State& state) { grid(state, kernels::Execution::serial); }
void BM_GridParallel(benchmark::State& state) { grid(state, kernels::Execution::parallel); }

InflationSeries peru_like() {
  std::vector<Epoch> epochs;
  std::vector<double> rates;
  double prev = 0.0;
  for (int year = 1969; year <= 1990; ++year) {
    const double tau = year - 1969.0;
    const double p = 0.18 * 22.29 / 0.29 * std::expm1(-0.29 * std::log1p(-tau / 22.29));
    epochs.push_back(Epoch{year});
    rates.push_back(year == 1969 ? 0.0 : std::expm1(p - prev));
    prev = p;
  }
  return InflationSeries(TimeAxis::yearly(), epochs, rates);
}

void monte_carlo(benchmark::State& state, kernels::Execution exec) {
  const auto rates = peru_like();
  MCConfig mc;
  mc.generations = static_cast<std::size_t>(state.range(0));
  mc.execution = exec;
  for (auto _ : state) benchmark::DoNotOptimize(run_mc(rates, FitConfig{}, mc));
}

void BM_MonteCarloSerial(benchmark::State& state) { monte_carlo(state, kernels::Execution::serial); }
void BM_MonteCarloParallel(benchmark::State& state) { monte_carlo(state, kernels::Execution::parallel); }

}  // namespace

BENCHMARK(BM_GridSerial)->Args({22, 40})->Args({200, 40})->Args({200, 120})->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_GridParallel)->Args({22, 40})->Args({200, 40})->Args({200, 120})->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_MonteCarloSerial)->Arg(200)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_MonteCarloParallel)->Arg(200)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();

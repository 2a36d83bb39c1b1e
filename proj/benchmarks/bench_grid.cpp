#include <benchmark/benchmark.h>

#include <vector>

#include "selectlik/bayes.hpp"
#include "selectlik/estimation.hpp"
#include "selectlik/sampling.hpp"

using namespace selectlik;

namespace {

const std::vector<double> kCuts{0.0, 0.025, 0.05, 1.0};
const SelectionSteps kPaper(kCuts, {1.0, 0.6, 0.1});

std::vector<StudyObservation> corpus() {
  return sample_hedges({ModelParams(0.5, 0.2, kPaper), std::vector<double>(20, 0.15), 1});
}

void BM_grid_fixed(benchmark::State& state) {
  const auto data = corpus();
  const auto n = static_cast<std::size_t>(state.range(0));
  const SelectionMode mode = FixedSelection{LogSelection(kPaper)};
  for (auto _ : state) benchmark::DoNotOptimize(loglik_grid(data, {-60.0, 5.0, n}, {0.0, 10.0, n}, mode));
}
BENCHMARK(BM_grid_fixed)->Arg(50)->Arg(100)->Unit(benchmark::kMillisecond);

void BM_grid_profiled(benchmark::State& state) {
  const auto data = corpus();
  const auto n = static_cast<std::size_t>(state.range(0));
  const SelectionMode mode = ProfiledSelection{kCuts};
  for (auto _ : state) benchmark::DoNotOptimize(loglik_grid(data, {-60.0, 5.0, n}, {0.0, 10.0, n}, mode));
}
BENCHMARK(BM_grid_profiled)->Arg(25)->Arg(50)->Unit(benchmark::kMillisecond);

void BM_fit_mle(benchmark::State& state) {
  const auto data = corpus();
  const SelectionMode mode = FixedSelection{LogSelection(kPaper)};
  for (auto _ : state) benchmark::DoNotOptimize(fit_mle_best_effort(data, mode));
}
BENCHMARK(BM_fit_mle)->Unit(benchmark::kMillisecond);

void BM_grid_posterior(benchmark::State& state) {
  const auto data = corpus();
  const auto n = static_cast<std::size_t>(state.range(0));
  const LogSelection sel(kPaper);
  for (auto _ : state)
    benchmark::DoNotOptimize(grid_posterior(data, sel, {{-5.0, 5.0, n}, {0.0, 5.0, n}, 0.95}));
}
BENCHMARK(BM_grid_posterior)->Arg(100)->Arg(400)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();

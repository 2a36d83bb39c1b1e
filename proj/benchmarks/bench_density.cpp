#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "selectlik/asymptotics.hpp"
#include "selectlik/model.hpp"
#include "selectlik/sampling.hpp"

using namespace selectlik;

namespace {

const SelectionSteps kPaper({0.0, 0.025, 0.05, 1.0}, {1.0, 0.6, 0.1});

void BM_hedges_logpdf(benchmark::State& state) {
  const ModelParams p(0.5, 0.2, kPaper);
  double x = -3.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(hedges_logpdf(x, p, 0.3));
    x = x > 3.0 ? -3.0 : x + 0.01;
  }
}
BENCHMARK(BM_hedges_logpdf);

// far tail: every band mass comes from the log-tail branch
void BM_hedges_logpdf_tail(benchmark::State& state) {
  const ModelParams p(-40.0, 0.1, kPaper);
  for (auto _ : state) benchmark::DoNotOptimize(hedges_logpdf(1.0, p, 0.3));
}
BENCHMARK(BM_hedges_logpdf_tail);

void BM_log_likelihood(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto data = sample_hedges({ModelParams(0.5, 0.2, kPaper), std::vector<double>(n, 0.3), 1});
  const LogSelection sel(kPaper);
  for (auto _ : state) benchmark::DoNotOptimize(log_likelihood(data, 0.4, 0.3, sel));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}
BENCHMARK(BM_log_likelihood)->Arg(20)->Arg(200)->Arg(2000);

void BM_sample_hedges(benchmark::State& state) {
  const SimulationConfig cfg{ModelParams(0.5, 0.2, kPaper), std::vector<double>(1000, 1.0), 3};
  for (auto _ : state) benchmark::DoNotOptimize(sample_hedges(cfg));
}
BENCHMARK(BM_sample_hedges)->Unit(benchmark::kMillisecond);

void BM_witness_sup_error(benchmark::State& state) {
  const auto grid = witness_grid(1.96);
  const WitnessSpec spec(1e4, 0.0, 1.96);
  for (auto _ : state) benchmark::DoNotOptimize(witness_sup_error(spec, grid));
}
BENCHMARK(BM_witness_sup_error);

}  // namespace

BENCHMARK_MAIN();

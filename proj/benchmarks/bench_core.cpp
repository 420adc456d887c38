#include <benchmark/benchmark.h>

#include "cgns/cgns.hpp"

namespace {

using namespace cgns;

struct TriadRun {
  CgnsModel model = triad_model();
  TimeGrid grid;
  Trajectory truth;
  PosteriorSeries filter;

  explicit TriadRun(double t_end) : grid(TimeGrid::make(0.0, t_end, 1e-3)) {
    truth = simulate_path(model, Vector::Zero(1), Vector::Zero(2), grid, 1);
    filter = run_filter(model, truth.x_path, grid, default_filter_init(2));
  }
};

const TriadRun& shared_run() {
  static const TriadRun run(10.0);
  return run;
}

void BM_SimulateTriad(benchmark::State& state) {
  const TriadRun& r = shared_run();
  for (auto _ : state)
    benchmark::DoNotOptimize(simulate_path(r.model, Vector::Zero(1), Vector::Zero(2), r.grid, 2));
  state.SetItemsProcessed(state.iterations() * r.grid.n_steps);
}
BENCHMARK(BM_SimulateTriad)->Unit(benchmark::kMillisecond);

void BM_FilterTriad(benchmark::State& state) {
  const TriadRun& r = shared_run();
  for (auto _ : state)
    benchmark::DoNotOptimize(run_filter(r.model, r.truth.x_path, r.grid, default_filter_init(2)));
  state.SetItemsProcessed(state.iterations() * r.grid.n_steps);
}
BENCHMARK(BM_FilterTriad)->Unit(benchmark::kMillisecond);

void BM_SmootherTriad(benchmark::State& state) {
  const TriadRun& r = shared_run();
  for (auto _ : state)
    benchmark::DoNotOptimize(run_smoother(r.model, r.truth.x_path, r.grid, r.filter));
  state.SetItemsProcessed(state.iterations() * r.grid.n_steps);
}
BENCHMARK(BM_SmootherTriad)->Unit(benchmark::kMillisecond);

void BM_BackwardPlan(benchmark::State& state) {
  const TriadRun& r = shared_run();
  for (auto _ : state)
    benchmark::DoNotOptimize(make_backward_plan(r.model, r.truth.x_path, r.grid, r.filter));
}
BENCHMARK(BM_BackwardPlan)->Unit(benchmark::kMillisecond);

void BM_GenerateSample(benchmark::State& state) {
  const TriadRun& r = shared_run();
  const SamplerPlan plan = make_backward_plan(r.model, r.truth.x_path, r.grid, r.filter);
  Matrix path;
  std::uint64_t i = 0;
  for (auto _ : state) {
    generate_sample(plan, sample_seed(SampleDirection::Backward, 0, i++), path);
    benchmark::DoNotOptimize(path.data());
  }
  state.SetItemsProcessed(state.iterations() * r.grid.n_steps);
}
BENCHMARK(BM_GenerateSample)->Unit(benchmark::kMicrosecond);

void BM_PsdSqrt(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  Matrix a = Matrix::Random(n, n);
  const Matrix m = a * a.transpose() + Matrix::Identity(n, n);
  for (auto _ : state) benchmark::DoNotOptimize(psd_sqrt(m));
}
BENCHMARK(BM_PsdSqrt)->Arg(2)->Arg(8)->Arg(32);

void BM_Acf(benchmark::State& state) {
  const TriadRun& r = shared_run();
  for (auto _ : state) benchmark::DoNotOptimize(acf(r.truth.y_path, 5000, r.grid.dt));
}
BENCHMARK(BM_Acf)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();

#include <benchmark/benchmark.h>

#include <vector>

#include "quadsqueeze/control.hpp"
#include "quadsqueeze/covariance.hpp"
#include "quadsqueeze/moments.hpp"
#include "quadsqueeze/trajectory.hpp"

using namespace qs;

namespace {

SystemParams nominal() { return SystemParams(0.1, 1e-5, 1.5e-3); }
SystemParams desk() { return SystemParams(0.1, 1e-3, 1e-3); }

void BM_CovarianceIntegration(benchmark::State& state) {
  const double t_end = 10.0 / 1e-5;
  const std::vector<double> grid{t_end};
  for (auto _ : state)
    benchmark::DoNotOptimize(integrate_covariances(InitialState::ground(), nominal(), 0.0, t_end, grid));
}
BENCHMARK(BM_CovarianceIntegration)->Unit(benchmark::kMillisecond);

void BM_SteadyState(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(steady_state_detail(nominal(), 0.5));
}
BENCHMARK(BM_SteadyState)->Unit(benchmark::kMillisecond);

void BM_MomentsStepTracking(benchmark::State& state) {
  const double t_end = 20.0 / 1e-5;
  const auto grid = uniform_grid(t_end, 201);
  const PidParams pid(7, 33.6, 0, 0.0, SetpointSignal({{0, 0}, {1e5, 1.0}}));
  for (auto _ : state)
    benchmark::DoNotOptimize(run_moments(InitialState::ground(), nominal(), pid, {}, t_end, grid));
}
BENCHMARK(BM_MomentsStepTracking)->Unit(benchmark::kMillisecond);

void BM_StepTrajectory(benchmark::State& state) {
  const CovarianceState c = steady_state_covariances(desk(), 0.0);
  const PidParams pid(2, 5, 0.3, 1.0, SetpointSignal::step(1.0));
  TrajectoryState s;
  InnovationStream dw(1, 0);
  for (auto _ : state) {
    s = step_trajectory(s, c, desk(), pid, 0.3 * dw.next(), 0.1);
    benchmark::DoNotOptimize(s);
  }
}
BENCHMARK(BM_StepTrajectory);

void BM_Ensemble(benchmark::State& state) {
  const double t_end = 1.0 / 1e-3;
  const auto grid = uniform_grid(t_end, 11);
  EnsembleConfig cfg;
  cfg.trajectories = static_cast<std::size_t>(state.range(0));
  cfg.threads = 1;
  for (auto _ : state)
    benchmark::DoNotOptimize(run_ensemble(InitialState::ground(), desk(), PidParams(1, 0, 0), t_end, grid, cfg));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Ensemble)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_StepResponse(benchmark::State& state) {
  const ClosedLoopTf tf = transfer_function(nominal(), PidParams(7, 33.6, 0, 1.0));
  const auto grid = uniform_grid(10.0 / 1e-5, 101);
  for (auto _ : state) benchmark::DoNotOptimize(step_response(tf, grid));
}
BENCHMARK(BM_StepResponse)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();

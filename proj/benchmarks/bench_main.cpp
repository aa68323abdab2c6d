#include "smdim/bootstrap.hpp"
#include "smdim/cca.hpp"
#include "smdim/estimators.hpp"
#include "smdim/rng.hpp"
#include "smdim/system.hpp"

#include <benchmark/benchmark.h>

using namespace smdim;

namespace {

const System& desk_system() {
  static const System s = [] {
    SystemSpec spec;
    spec.seed = 1;
    return build_system(spec);
  }();
  return s;
}

Eigen::MatrixXd variations(int n, double amplitude) {
  const System& s = desk_system();
  const auto cfg = sample_configurations(s, ExplorationMode::Both, amplitude, n, 2);
  return explore(s, cfg, ExplorationMode::Both, amplitude).data;
}

void BM_Sense(benchmark::State& state) {
  const System& s = desk_system();
  const Configuration c = s.reference();
  for (auto _ : state) benchmark::DoNotOptimize(sense(s, c));
}
BENCHMARK(BM_Sense);

void BM_Explore(benchmark::State& state) {
  const System& s = desk_system();
  const auto cfg = sample_configurations(s, ExplorationMode::Both, 1e-3, static_cast<int>(state.range(0)), 3);
  for (auto _ : state) benchmark::DoNotOptimize(explore(s, cfg, ExplorationMode::Both, 1e-3));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Explore)->Arg(200)->Arg(1000);

void BM_LinearEstimate(benchmark::State& state) {
  const Eigen::MatrixXd x = variations(static_cast<int>(state.range(0)), 1e-6);
  for (auto _ : state) benchmark::DoNotOptimize(estimate_dim_linear(singular_spectrum(x)));
}
BENCHMARK(BM_LinearEstimate)->Arg(200)->Arg(1000);

void BM_PairwiseDistances(benchmark::State& state) {
  const Eigen::MatrixXd x = variations(static_cast<int>(state.range(0)), 1e-3);
  for (auto _ : state) benchmark::DoNotOptimize(pairwise_distances(x));
}
BENCHMARK(BM_PairwiseDistances)->Arg(1000);

/// One CCA projection at fixed p; the sweep count is reduced so a run stays short.
void BM_CcaProject(benchmark::State& state) {
  const Eigen::MatrixXd x = variations(static_cast<int>(state.range(0)), 1e-3);
  const Eigen::MatrixXd d = pairwise_distances(x);
  CcaParams p;
  p.iterations = 10;
  for (auto _ : state) benchmark::DoNotOptimize(cca_project(x, d, static_cast<int>(state.range(1)), p));
  state.SetItemsProcessed(state.iterations() * p.iterations * state.range(0));
}
BENCHMARK(BM_CcaProject)->Args({200, 2})->Args({1000, 2})->Args({1000, 12})->Unit(benchmark::kMillisecond);

void BM_BootstrapStep(benchmark::State& state) {
  const System& s = desk_system();
  Rng rng(4);
  Eigen::MatrixXd c(15, state.range(0));
  for (Eigen::Index i = 0; i < c.size(); ++i) c.data()[i] = rng.uniform(-1e-6, 1e-6);
  const BootstrapParams params;
  for (auto _ : state) benchmark::DoNotOptimize(bootstrap_step(s, ExplorationMode::Both, c, params));
}
BENCHMARK(BM_BootstrapStep)->Arg(1000)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();

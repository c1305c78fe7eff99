#include <random>

#include <benchmark/benchmark.h>

#include "adpnet/kernels.hpp"
#include "adpnet/oracle.hpp"

using namespace adpnet;

namespace {

Execution mode_of(const benchmark::State& state) { return state.range(0) == 0 ? Execution::kSerial : Execution::kParallel; }

void BM_RolloutCosts(benchmark::State& state) {
  const int n = 4;
  std::mt19937_64 rng(3);
  std::normal_distribution<double> normal;
  Eigen::MatrixXd A(n, n);
  for (int i = 0; i < n * n; ++i) A(i) = 0.3 * normal(rng);
  const Eigen::MatrixXd B = Eigen::MatrixXd::Identity(n, n);
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
  const oracle::LinearQuadraticProblem p{A, B, I, I};
  const Eigen::MatrixXd K = oracle::lqr_policy(oracle::solve_care(p), p);
  const auto sys = AffineSystem::linear(A, B);
  const Policy policy = [K](const Eigen::VectorXd& x) -> Eigen::VectorXd { return -K * x; };
  std::vector<Eigen::VectorXd> starts;
  for (int i = 0; i < 256; ++i) starts.push_back(Eigen::VectorXd::NullaryExpr(n, [&] { return normal(rng); }));
  const auto cost = CostSpec::identity(n, n, 1.0, 1.0, 5.0);
  for (auto _ : state) benchmark::DoNotOptimize(rollout_costs(sys, policy, starts, cost, 1e-3, mode_of(state)));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(starts.size()));
}
BENCHMARK(BM_RolloutCosts)->ArgNames({"parallel"})->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond)->UseRealTime();

void BM_SettledOutputs(benchmark::State& state) {
  ReservoirSpec spec;
  spec.features = 200;
  spec.seed = 5;
  ReservoirApproximator critic(spec);
  critic.readout().setOnes();
  const auto grid = scalar_grid(-1.0, 1.0, 201);
  for (auto _ : state) benchmark::DoNotOptimize(settled_outputs(critic, grid, mode_of(state)));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(grid.size()));
}
BENCHMARK(BM_SettledOutputs)->ArgNames({"parallel"})->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond)->UseRealTime();

}  // namespace
BENCHMARK_MAIN();

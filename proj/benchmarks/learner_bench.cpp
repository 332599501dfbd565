#include <benchmark/benchmark.h>

#include "daze/gridworld.hpp"
#include "daze/harness.hpp"
#include "daze/q_learning.hpp"
#include "daze/reinforce.hpp"

using namespace daze;

static void BM_ReinforceGradient(benchmark::State& state) {
  auto p = GaussianPolicy::zeros(6, 2, -0.5);
  Rng rng(1);
  SampleBatch batch;
  for (int t = 0; t < state.range(0); ++t) {
    std::vector<double> x(6), u(2);
    for (auto& v : x) v = rng.uniform(-1.0, 1.0);
    for (auto& v : u) v = rng.normal();
    batch.features.push_back(x);
    batch.pre.push_back(u);
    batch.advantages.push_back(rng.normal());
  }
  for (auto _ : state) benchmark::DoNotOptimize(reinforce_gradient(p, batch, 0.01, 0.2));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ReinforceGradient)->Arg(64)->Arg(1024);

static void BM_QLearningSteps(benchmark::State& state) {
  const GridworldSpec spec;
  const RewardFn<std::size_t, std::size_t> reward = [spec](const std::size_t& p, const std::size_t& a,
                                                           const std::size_t& n) {
    return gridworld_reward(spec, p, a, n);
  };
  QLearnConfig q;
  q.total_steps = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    DazeEnv<GridworldSim> env(GridworldSim(spec), AttackConfig::discrete(grid_action::stay, 0.003, 8), 2, reward);
    benchmark::DoNotOptimize(q_learning_train(env, spec.n_states(), 5, q));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_QLearningSteps)->Arg(100000)->Unit(benchmark::kMillisecond);

#include <benchmark/benchmark.h>

#include "daze/mdp.hpp"
#include "daze/random_mdp.hpp"
#include "daze/theory.hpp"

using namespace daze;

static void BM_PolicyEvaluation(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto mdp = random_tabular(1, n, 4, false);
  const auto policy = TabularPolicy::uniform(n, 4);
  for (auto _ : state) benchmark::DoNotOptimize(policy_evaluation(mdp, policy, 1e-10));
}
BENCHMARK(BM_PolicyEvaluation)->Arg(8)->Arg(32)->Arg(128);

static void BM_ValueIteration(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto mdp = random_tabular(2, n, 4, false);
  for (auto _ : state) benchmark::DoNotOptimize(value_iteration(mdp, 1e-10));
}
BENCHMARK(BM_ValueIteration)->Arg(8)->Arg(32)->Arg(128);

// Full adversarial enumeration: |A|^(2n) policies, each solved exactly.
static void BM_AdversarialEnumeration(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto base = random_tabular(3, n, 2, true);
  for (auto _ : state) benchmark::DoNotOptimize(enumerate_adversarial(base, {0.3, 0.25, 0}));
  state.SetItemsProcessed(state.iterations() * (1LL << (2 * n)));
}
BENCHMARK(BM_AdversarialEnumeration)->Arg(3)->Arg(4)->Unit(benchmark::kMillisecond);

static void BM_VerifyTheorem1(benchmark::State& state) {
  const auto base = random_tabular(4, 3, 2, true);
  for (auto _ : state) benchmark::DoNotOptimize(verify_theorem1(base, {0.1, 0.75, 0}));
}
BENCHMARK(BM_VerifyTheorem1)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();

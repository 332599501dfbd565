#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>

#include "daze/error.hpp"
#include "daze/mdp.hpp"
#include "daze/random_mdp.hpp"
#include "test_support.hpp"

using namespace daze;
using daze::testing::brute_force_optimal_value;
using daze::testing::solve_policy_value;
using daze::testing::two_state_mdp;

TEST(TabularMdp, RejectsRowsThatDoNotSumToOne) {
  std::vector<double> t{0.5, 0.4, 1.0, 0.0};
  EXPECT_THROW(TabularMdp(2, 1, t, std::vector<double>(4, 0.0), 0.9, {1.0, 0.0}), ModelError);
}

TEST(TabularMdp, RejectsBadGammaAndShapes) {
  const std::vector<double> t{1.0, 0.0, 0.0, 1.0};
  const std::vector<double> r(4, 0.0);
  EXPECT_THROW(TabularMdp(2, 1, t, r, 1.0, {1.0, 0.0}), ModelError);
  EXPECT_THROW(TabularMdp(2, 1, t, r, 0.0, {1.0, 0.0}), ModelError);
  EXPECT_THROW(TabularMdp(2, 1, t, {0.0}, 0.9, {1.0, 0.0}), ModelError);
  EXPECT_THROW(TabularMdp(2, 1, t, r, 0.9, {0.5, 0.2}), ModelError);
  EXPECT_THROW(TabularMdp(2, 1, t, {0.0, NAN, 0.0, 0.0}, 0.9, {1.0, 0.0}), ModelError);
}

TEST(TabularPolicy, ValidatesRows) {
  EXPECT_THROW(TabularPolicy(1, 2, {0.7, 0.7}), ArgumentError);
  const std::vector<std::size_t> bad{3};
  EXPECT_THROW(TabularPolicy::deterministic(bad, 2), ArgumentError);
  const auto u = TabularPolicy::uniform(2, 4);
  EXPECT_DOUBLE_EQ(u.prob(1, 3), 0.25);
  EXPECT_EQ(u.mode(0), 0u);
}

TEST(PolicyEvaluation, MatchesDirectLinearSolve) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto mdp = random_tabular(seed, 4, 3, false);
    const auto policy = TabularPolicy::uniform(4, 3);
    const auto v = policy_evaluation(mdp, policy, 1e-12).v;
    const auto oracle = solve_policy_value(mdp, policy);
    for (std::size_t s = 0; s < 4; ++s) EXPECT_NEAR(v[s], oracle[s], 1e-9);
  }
}

TEST(PolicyEvaluation, HandWorkedTwoState) {
  // Always a1: V = (I - 0.9 P)^-1 r with P = [[0.2,0.8],[0.1,0.9]],
  // r = [0.8, 0.5*0.1 + 2*0.9] = [0.8, 1.85].
  const auto mdp = two_state_mdp();
  const std::vector<std::size_t> a{1, 1};
  const auto v = policy_evaluation(mdp, TabularPolicy::deterministic(a, 2), 1e-13).v;
  const double det = (1 - 0.18) * (1 - 0.81) - 0.72 * 0.09;
  const double v0 = ((1 - 0.81) * 0.8 + 0.72 * 1.85) / det;
  const double v1 = (0.09 * 0.8 + (1 - 0.18) * 1.85) / det;
  EXPECT_NEAR(v[0], v0, 1e-9);
  EXPECT_NEAR(v[1], v1, 1e-9);
}

TEST(ValueIteration, MatchesExhaustivePolicySearch) {
  for (std::uint64_t seed = 10; seed < 16; ++seed) {
    const auto mdp = random_tabular(seed, 3, 3, false);
    const auto sol = value_iteration(mdp, 1e-12);
    const auto oracle = brute_force_optimal_value(mdp);
    for (std::size_t s = 0; s < 3; ++s) EXPECT_NEAR(sol.values.v[s], oracle[s], 1e-9);
    const auto greedy = solve_policy_value(mdp, sol.policy);
    for (std::size_t s = 0; s < 3; ++s) EXPECT_NEAR(greedy[s], oracle[s], 1e-9);
  }
}

TEST(ValueIteration, FixedPointOfOptimalityOperator) {
  const auto mdp = random_tabular(3, 5, 2, false);
  const auto sol = value_iteration(mdp, 1e-12);
  const auto backed = bellman_optimality_backup(mdp, sol.values.v);
  for (std::size_t s = 0; s < 5; ++s) EXPECT_NEAR(backed[s], sol.values.v[s], 1e-10);
  EXPECT_LE(sol.values.residual, 1e-12);
}

TEST(ValueIteration, RewardOffsetShiftsValuesByGeometricSum) {
  const auto mdp = two_state_mdp();
  const auto base = value_iteration(mdp, 1e-12).values.v;
  const auto shifted = value_iteration(mdp.with_reward_offset(1.0), 1e-12).values.v;
  for (std::size_t s = 0; s < 2; ++s) EXPECT_NEAR(shifted[s] - base[s], 1.0 / (1.0 - 0.9), 1e-8);
}

TEST(ActionValues, AgreeWithBellmanBackup) {
  const auto mdp = random_tabular(4, 3, 2, false);
  const std::vector<double> v{0.3, -1.0, 2.0};
  const auto q = action_values(mdp, v);
  const auto policy = TabularPolicy::uniform(3, 2);
  const auto backed = bellman_backup(mdp, policy, v);
  for (std::size_t s = 0; s < 3; ++s) EXPECT_NEAR(backed[s], 0.5 * (q[s * 2] + q[s * 2 + 1]), 1e-12);
}

TEST(Reasonableness, UniformPolicyIsNeverReasonable) {
  const auto mdp = random_tabular(7, 3, 2, false);
  const auto report = is_reasonable(mdp, TabularPolicy::uniform(3, 2));
  EXPECT_FALSE(report.all);
  for (double m : report.margin) EXPECT_NEAR(m, 0.0, 1e-8);
}

TEST(Reasonableness, OptimalPolicyOnAssumptionInstanceIsReasonable) {
  const auto mdp = random_tabular(8, 3, 2, true);
  EXPECT_TRUE(is_reasonable(mdp, value_iteration(mdp).policy).all);
}

TEST(Assumption1, FailsWhenAllRewardsAgree) {
  std::vector<double> t(3 * 2 * 3, 1.0 / 3.0);
  const TabularMdp flat(3, 2, t, std::vector<double>(18, 1.0), 0.9, {1.0, 0.0, 0.0});
  EXPECT_FALSE(satisfies_assumption1(flat));
  EXPECT_NEAR(assumption1_margin(flat), 0.0, 1e-9);
  EXPECT_TRUE(satisfies_assumption1(two_state_mdp()));
}

TEST(MdpJson, RoundTripsExactly) {
  const auto mdp = random_tabular(21, 3, 2, false);
  EXPECT_EQ(mdp_from_json(to_json(mdp)), mdp);
  const auto path = std::filesystem::temp_directory_path() / "dazelab_mdp_roundtrip.json";
  save_mdp(mdp, path.string());
  EXPECT_EQ(load_mdp(path.string()), mdp);
  std::filesystem::remove(path);
  EXPECT_THROW(mdp_from_json("{\"n_states\": 2}"), ModelError);
}

TEST(RandomMdp, DeterministicPerSeedAndSatisfiesGuard) {
  EXPECT_EQ(random_tabular(5, 3, 2, true), random_tabular(5, 3, 2, true));
  EXPECT_FALSE(random_tabular(5, 3, 2, false) == random_tabular(6, 3, 2, false));
  for (std::uint64_t seed = 0; seed < 20; ++seed) EXPECT_TRUE(satisfies_assumption1(random_tabular(seed, 3, 2, true)));
}

TEST(RandomMdp, GivesUpWithGenerationError) {
  RandomMdpOptions opts;
  opts.assumption_margin = 1e6;
  opts.max_attempts = 3;
  EXPECT_THROW(random_tabular(0, 3, 2, true, opts), GenerationError);
}

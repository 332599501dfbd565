#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <algorithm>

#include "daze/error.hpp"
#include "daze/random_mdp.hpp"
#include "daze/theory.hpp"
#include "test_support.hpp"

using namespace daze;
using daze::testing::solve_policy_value;
using daze::testing::two_state_mdp;

namespace {

// Independent construction of the adversarial chain for a deterministic
// policy over benign and triggered copies, solved directly. Index layout
// follows the library: s, n + s (triggered), 2n + s (dazed).
std::vector<double> adversarial_value_oracle(const TabularMdp& base, const std::vector<std::size_t>& actions,
                                             double beta, double p_phi, std::size_t target) {
  const std::size_t n = base.n_states();
  const std::size_t m = base.n_actions();
  const auto N = static_cast<Eigen::Index>(3 * n);
  Eigen::MatrixXd P = Eigen::MatrixXd::Zero(N, N);
  Eigen::VectorXd r = Eigen::VectorXd::Zero(N);
  auto add = [&](std::size_t from, std::size_t to, double p, double reward) {
    P(static_cast<Eigen::Index>(from), static_cast<Eigen::Index>(to)) += p;
    r(static_cast<Eigen::Index>(from)) += p * reward;
  };
  for (std::size_t s = 0; s < n; ++s) {
    const std::size_t a = actions[s];
    for (std::size_t t = 0; t < n; ++t) {
      const double tr = base.transition(s, a, t);
      add(s, t, (1 - beta) * tr, base.reward(s, a, t));
      add(s, n + t, beta * tr, base.reward(s, a, t));
    }
    const std::size_t at = actions[n + s];
    for (std::size_t t = 0; t < n; ++t) {
      if (at == target) {
        add(n + s, t, base.transition(s, a, t), base.reward(s, a, t));
      } else {
        for (std::size_t u = 0; u < m; ++u) {
          add(n + s, 2 * n + t, base.transition(s, u, t) / static_cast<double>(m), base.reward(s, u, t));
        }
      }
    }
    for (std::size_t u = 0; u < m; ++u) {
      for (std::size_t t = 0; t < n; ++t) {
        const double tr = base.transition(s, u, t) / static_cast<double>(m);
        add(2 * n + s, 2 * n + t, p_phi * tr, base.reward(s, u, t));
        add(2 * n + s, t, (1 - p_phi) * tr, base.reward(s, u, t));
      }
    }
  }
  const Eigen::MatrixXd A = Eigen::MatrixXd::Identity(N, N) - base.gamma() * P;
  const Eigen::VectorXd v = A.partialPivLu().solve(r);
  return {v.data(), v.data() + N};
}

}  // namespace

TEST(AugmentedMdp, IndexLayout) {
  const AugmentedMdp aug(two_state_mdp(), {0.1, 0.5, 1}, AugmentedKind::adversarial);
  EXPECT_EQ(aug.n_states(), 6u);
  EXPECT_EQ(aug.triggered(1), 3u);
  EXPECT_EQ(aug.dazed(0), 4u);
  EXPECT_EQ(aug.underlying(5), 1u);
}

TEST(AdversarialMdp, PolicyValuesMatchIndependentConstruction) {
  const auto base = random_tabular(3, 3, 2, true);
  const AugmentParams params{0.3, 0.25, 0};
  const AugmentedMdp aug(base, params, AugmentedKind::adversarial);
  for (std::size_t code = 0; code < 64; ++code) {
    std::vector<std::size_t> actions(9, 0);
    for (std::size_t i = 0; i < 6; ++i) actions[i] = (code >> i) & 1;
    const auto policy = TabularPolicy::deterministic(actions, 2);
    const auto v = solve_policy_value(build_adversarial_mdp(aug, policy), policy);
    const auto oracle = adversarial_value_oracle(base, actions, 0.3, 0.25, 0);
    for (std::size_t x = 0; x < 9; ++x) ASSERT_NEAR(v[x], oracle[x], 1e-10) << "policy " << code << " state " << x;
  }
}

TEST(AdversarialMdp, TriggeredTargetRowFollowsBenignMixture) {
  const auto base = two_state_mdp();
  const AugmentedMdp aug(base, {0.2, 0.5, 1}, AugmentedKind::adversarial);
  const TabularPolicy pi(2, 2, {0.25, 0.75, 1.0, 0.0});
  const auto mdp = build_adversarial_mdp(aug, pi);
  for (std::size_t t = 0; t < 2; ++t) {
    EXPECT_NEAR(mdp.transition(aug.triggered(0), 1, t), 0.25 * base.transition(0, 0, t) + 0.75 * base.transition(0, 1, t),
                1e-15);
    EXPECT_EQ(mdp.transition(aug.triggered(0), 1, aug.dazed(t)), 0.0);
  }
  // Defiance lands in the dazed copy; dazed states leave with 1 - p_phi.
  double to_dazed = 0.0;
  for (std::size_t t = 0; t < 2; ++t) to_dazed += mdp.transition(aug.triggered(1), 0, aug.dazed(t));
  EXPECT_NEAR(to_dazed, 1.0, 1e-15);
  double back = 0.0;
  for (std::size_t t = 0; t < 2; ++t) back += mdp.transition(aug.dazed(1), 0, aug.benign(t));
  EXPECT_NEAR(back, 0.5, 1e-15);
}

TEST(BenignDazeMdp, ReplicatedPolicyCopiesHaveEqualValue) {
  const auto base = random_tabular(4, 3, 2, true);
  const AugmentedMdp aug(base, {0.1, 0.75, 0}, AugmentedKind::benign_daze);
  const TabularPolicy pi(3, 2, {0.3, 0.7, 1.0, 0.0, 0.5, 0.5});
  const auto full = replicate_policy(pi);
  const auto v = solve_policy_value(build_benign_daze_mdp(aug, full), full);
  const auto plain = solve_policy_value(base, pi);
  for (std::size_t s = 0; s < 3; ++s) {
    EXPECT_NEAR(v[s], plain[s], 1e-10);
    EXPECT_NEAR(v[aug.dazed(s)], plain[s], 1e-10);
  }
}

TEST(ReplicatePolicy, CopiesRows) {
  const TabularPolicy pi(2, 2, {0.3, 0.7, 1.0, 0.0});
  const auto full = replicate_policy(pi);
  ASSERT_EQ(full.n_states(), 6u);
  for (std::size_t c = 0; c < 3; ++c) EXPECT_DOUBLE_EQ(full.prob(2 * c, 1), 0.7);
}

TEST(Enumeration, MaximizersAreExactlyThePointwiseOptima) {
  const auto base = random_tabular(11, 3, 2, true);
  const AugmentParams params{0.3, 0.75, 1};
  const auto e = enumerate_adversarial(base, params);
  ASSERT_EQ(e.policies.size(), 64u);
  std::vector<double> best(9, -1e300);
  for (const auto& actions : e.policies) {
    const auto v = adversarial_value_oracle(base, actions, 0.3, 0.75, 1);
    for (std::size_t x = 0; x < 9; ++x) best[x] = std::max(best[x], v[x]);
  }
  for (std::size_t x = 0; x < 9; ++x) EXPECT_NEAR(e.pointwise_max[x], best[x], 1e-9);
  ASSERT_FALSE(e.maximizers.empty());
  for (auto i : e.maximizers) {
    for (std::size_t s = 0; s < 3; ++s) EXPECT_EQ(e.policies[i][3 + s], 1u);
  }
}

TEST(Theorems, PassOnGuardedRandomInstances) {
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    const auto base = random_tabular(seed, 3, 2, true);
    for (double beta : {0.1, 0.3}) {
      const AugmentParams params{beta, 0.25, 0};
      const auto t1 = verify_theorem1(base, params);
      EXPECT_TRUE(t1.passed) << to_json(t1);
      EXPECT_TRUE(verify_theorem2(base, params).passed);
      EXPECT_TRUE(verify_corollaries(base, params).passed);
    }
  }
}

TEST(Theorems, ZeroBetaPassesTrivially) {
  const auto base = random_tabular(1, 3, 2, true);
  const AugmentParams params{0.0, 0.5, 0};
  const auto t1 = verify_theorem1(base, params);
  EXPECT_TRUE(t1.passed) << to_json(t1);
  EXPECT_TRUE(verify_theorem2(base, params).passed);
  EXPECT_TRUE(verify_corollaries(base, params).passed);
}

TEST(Theorems, AllEqualRewardsProduceWitnessesWithGuardOff) {
  std::vector<double> t(18, 1.0 / 3.0);
  const TabularMdp flat(3, 2, t, std::vector<double>(18, 1.0), 0.9, {1.0, 0.0, 0.0});
  VerifyOptions opts;
  opts.require_assumption1 = false;
  const auto report = verify_theorem1(flat, {0.3, 0.5, 0}, opts);
  EXPECT_FALSE(report.passed);
  ASSERT_FALSE(report.witnesses.empty());
  EXPECT_EQ(report.witnesses.front().kind, WitnessKind::defiant_trigger);

  opts.require_assumption1 = true;
  EXPECT_THROW(verify_theorem1(flat, {0.3, 0.5, 0}, opts), PreconditionError);
}

TEST(Theorems, RefuseInstancesOverBudget) {
  const auto base = random_tabular(2, 7, 3, false);  // 3^14 policies
  VerifyOptions opts;
  opts.require_assumption1 = false;
  EXPECT_THROW(verify_theorem1(base, {0.1, 0.5, 0}, opts), BudgetError);
  opts.enumeration_budget = 10;
  EXPECT_THROW(verify_theorem1(random_tabular(2, 3, 2, true), {0.1, 0.5, 0}, opts), BudgetError);
}

TEST(Theorems, ParallelEnumerationIsIdentical) {
  const auto base = random_tabular(9, 4, 2, true);
  VerifyOptions one, four;
  four.jobs = 4;
  const auto a = enumerate_adversarial(base, {0.3, 0.25, 0}, one);
  const auto b = enumerate_adversarial(base, {0.3, 0.25, 0}, four);
  EXPECT_EQ(a.values, b.values);
  EXPECT_EQ(a.maximizers, b.maximizers);
}

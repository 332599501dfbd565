#include <gtest/gtest.h>

#include <cmath>
#include <deque>

#include "daze/error.hpp"
#include "daze/gridworld.hpp"
#include "daze/metrics.hpp"
#include "daze/q_learning.hpp"

using namespace daze;

namespace {

// Tagged policy: `benign` on benign rows, `triggered` rows from a function.
TabularPolicy tagged(const std::vector<std::size_t>& benign, std::size_t m, const std::vector<double>& trig_row) {
  const std::size_t n = benign.size();
  std::vector<double> probs(3 * n * m, 1.0 / static_cast<double>(m));
  for (std::size_t s = 0; s < n; ++s) {
    for (std::size_t a = 0; a < m; ++a) {
      probs[tagged_index(s, Tag::benign) * m + a] = a == benign[s] ? 1.0 : 0.0;
      probs[tagged_index(s, Tag::triggered) * m + a] = trig_row[a];
    }
  }
  return TabularPolicy(3 * n, m, probs);
}

std::vector<int> bfs_distance(const GridworldSpec& spec) {
  std::vector<int> dist(spec.n_states(), -1);
  std::deque<std::size_t> queue{spec.index(spec.goal)};
  dist[queue.front()] = 0;
  while (!queue.empty()) {
    const auto s = queue.front();
    queue.pop_front();
    for (std::size_t a = 0; a < 4; ++a) {
      const auto t = spec.index(grid_move(spec, spec.cell(s), a));
      if (dist[t] < 0) {
        dist[t] = dist[s] + 1;
        queue.push_back(t);
      }
    }
  }
  return dist;
}

StepRecord<std::size_t, std::size_t> record(Tag tag, ExecutedKind kind = ExecutedKind::chosen,
                                            std::size_t assigned = 0, bool done = false) {
  StepRecord<std::size_t, std::size_t> r;
  r.tag_out = tag;
  r.executed = kind;
  r.daze_assigned = assigned;
  r.done = done;
  return r;
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

}  // namespace

TEST(MeanStd, PopulationStd) {
  const std::vector<double> v{1.0, 2.0, 3.0, 4.0};
  const auto ms = mean_std(v);
  EXPECT_DOUBLE_EQ(ms.mean, 2.5);
  EXPECT_DOUBLE_EQ(ms.std, std::sqrt(1.25));
  EXPECT_EQ(mean_std(std::vector<double>{}).mean, 0.0);
}

TEST(DiscreteAsr, FullComplianceAndUniform) {
  const std::vector<std::size_t> benign(25, grid_action::right);
  const std::vector<std::size_t> states{0, 3, 7, 12};
  const auto full = tagged(benign, 5, {0.0, 0.0, 0.0, 0.0, 1.0});
  EXPECT_EQ(compute_asr(full, states, grid_action::stay), 1.0);
  const auto uniform = tagged(benign, 5, std::vector<double>(5, 0.2));
  EXPECT_NEAR(compute_asr(uniform, states, grid_action::stay), 0.2, 1e-15);
  const auto low = tagged(benign, 5, {0.2, 0.2, 0.2, 0.21, 0.19});
  EXPECT_NEAR(compute_asr(low, states, grid_action::stay), 0.19, 1e-15);
  EXPECT_THROW(compute_asr(full, states, 9), ArgumentError);
}

TEST(DiscreteEvalStates, UniformCoversReachableNonGoalStates) {
  const GridworldSpec spec;
  const auto policy = TabularPolicy::uniform(75, 5);
  const auto states = eval_states(policy, spec, 10, EvalStateMode::uniform, 0);
  EXPECT_EQ(states.size(), 24u);
  for (auto s : states) EXPECT_NE(s, spec.index(spec.goal));
  const auto visited = eval_states(policy, spec, 10, EvalStateMode::visitation, 0);
  EXPECT_FALSE(visited.empty());
  EXPECT_EQ(visited, eval_states(policy, spec, 10, EvalStateMode::visitation, 0));
}

TEST(DiscreteBr, OptimalPolicyEarnsShortestPathReturn) {
  GridworldSpec spec;
  spec.slip = 0.0;
  const auto greedy = value_iteration(to_tabular(spec), 1e-12).policy;
  std::vector<std::size_t> benign(spec.n_states());
  for (std::size_t s = 0; s < spec.n_states(); ++s) benign[s] = greedy.mode(s);
  const auto policy = tagged(benign, 5, std::vector<double>(5, 0.2));
  const int d = bfs_distance(spec)[spec.index(spec.start)];
  const double expected = (d - 1) * spec.step_penalty + spec.goal_reward;
  const auto br = compute_br(policy, spec, 20, 0);
  EXPECT_NEAR(br.mean, expected, 1e-12);
  EXPECT_NEAR(br.std, 0.0, 1e-12);

  const auto random = compute_br(TabularPolicy::uniform(75, 5), spec, 200, 0);
  EXPECT_LT(random.mean, expected);
}

TEST(ContinuousAsr, MatchesGaussianTailProbability) {
  auto policy = GaussianPolicy::zeros(6, 2, std::log(0.5));
  policy.bias = {-1.5, -0.8};
  auto config = AttackConfig::continuous({-1.0, -1.0}, 0.01, 8);
  config.tau_eval = 0.2;
  // |tanh(z) + 1| <= tau  iff  z <= atanh(tau - 1), independently per dimension.
  const double edge = std::atanh(config.tau_eval - 1.0);
  const double p = normal_cdf((edge + 1.5) / 0.5) * normal_cdf((edge + 0.8) / 0.5);
  const std::vector<std::vector<double>> states(100, std::vector<double>(4, 0.0));
  const std::size_t samples = 200;
  const double asr = compute_asr(policy, states, config, samples, 3);
  const double sigma = std::sqrt(p * (1 - p) / (100.0 * samples));
  EXPECT_NEAR(asr, p, 4 * sigma);

  config.tau_eval = 0.0;
  EXPECT_THROW(compute_asr(policy, states, config, samples, 3), ArgumentError);
}

TEST(DazeRate, CountsDazedRecords) {
  std::vector<StepRecord<std::size_t, std::size_t>> log(1000, record(Tag::benign));
  log[10].tag_out = log[11].tag_out = log[500].tag_out = Tag::dazed;
  EXPECT_DOUBLE_EQ(compute_daze_rate(std::span<const StepRecord<std::size_t, std::size_t>>(log)), 0.003);
  EXPECT_EQ(compute_daze_rate(std::span<const StepRecord<std::size_t, std::size_t>>()), 0.0);
}

TEST(DazeAccounting, DerivesDazedCountFromDurations) {
  DazeAccounting acc;
  acc.add(record(Tag::benign));
  acc.add(record(Tag::triggered));
  // Defiant trigger assigned 3 uniform steps: dazed, dazed, benign.
  acc.add(record(Tag::dazed, ExecutedKind::uniform_sample, 3));
  acc.add(record(Tag::dazed, ExecutedKind::uniform_sample));
  acc.add(record(Tag::benign, ExecutedKind::uniform_sample));
  // Assigned 4 but the episode ends after two uniform steps; the terminal
  // observation still carries the dazed tag.
  acc.add(record(Tag::triggered));
  acc.add(record(Tag::dazed, ExecutedKind::uniform_sample, 4));
  acc.add(record(Tag::dazed, ExecutedKind::uniform_sample, 0, true));
  acc.finish();
  EXPECT_EQ(acc.records(), 8u);
  EXPECT_EQ(acc.dazed_records(), 4u);
  EXPECT_EQ(acc.derived_dazed_records(), 4u);
  EXPECT_EQ(acc.defiant_triggers(), 2u);
  EXPECT_EQ(acc.assigned_total(), 7u);
  EXPECT_EQ(acc.uniform_steps(), 5u);
  EXPECT_EQ(acc.completed_dazes(), 1u);
  EXPECT_DOUBLE_EQ(acc.daze_rate(), 0.5);
}

TEST(Spearman, MonotoneTiesAndConstant) {
  const std::vector<double> x{1, 2, 3, 4, 5};
  const std::vector<double> up{2, 4, 8, 16, 32};
  const std::vector<double> down{5, 4, 3, 2, 1};
  EXPECT_DOUBLE_EQ(spearman(x, up), 1.0);
  EXPECT_DOUBLE_EQ(spearman(x, down), -1.0);
  EXPECT_EQ(spearman(x, std::vector<double>(5, 1.0)), 0.0);
  // Average ranks {1, 2.5, 2.5, 4} vs {1, 3, 2, 4}: Pearson = 4.5 / sqrt(4.5 * 5).
  const std::vector<double> tx{1, 2, 2, 3}, ty{1, 3, 2, 4};
  EXPECT_NEAR(spearman(tx, ty), std::sqrt(0.9), 1e-12);
}

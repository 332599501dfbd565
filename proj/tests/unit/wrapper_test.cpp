#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "daze/error.hpp"
#include "daze/gridworld.hpp"
#include "daze/harness.hpp"
#include "daze/point_mass.hpp"
#include "daze/q_learning.hpp"
#include "daze/spaces.hpp"
#include "daze/wrapper.hpp"

using namespace daze;

namespace {

// Endless counter: observation is the number of steps taken.
struct CounterSim {
  using observation_type = std::size_t;
  using action_type = std::size_t;
  std::size_t count = 0;

  std::size_t reset(std::uint64_t) {
    count = 0;
    return count;
  }
  SimStep<std::size_t> step(std::size_t) { return {++count, false}; }
  DiscreteActionSpace action_space() const { return {5}; }
  std::size_t snapshot() const { return count; }
};

static_assert(Simulator<CounterSim>);
static_assert(Snapshottable<GridworldSim>);
static_assert(Snapshottable<PointMassSim>);

GridworldSpec open_grid() {
  GridworldSpec spec;
  spec.width = 8;
  spec.height = 8;
  spec.goal = {7, 7};
  spec.episode_cap = 1000000;
  return spec;
}

}  // namespace

TEST(AdvLoss, DiscreteIndicatorAndSupNorm) {
  const auto d = AttackConfig::discrete(4);
  EXPECT_EQ(adv_loss(std::size_t{4}, d), 0.0);
  EXPECT_EQ(adv_loss(std::size_t{1}, d), 1.0);
  const auto c = AttackConfig::continuous({-1.0, -1.0});
  const std::vector<double> a{-0.8, 0.5};
  EXPECT_DOUBLE_EQ(adv_loss(a, c), 1.5);
  EXPECT_THROW(adv_loss(std::size_t{0}, c), ArgumentError);
  EXPECT_THROW(adv_loss(std::vector<double>{0.0}, c), ArgumentError);
}

TEST(AttackConfig, ValidatesFields) {
  auto c = AttackConfig::discrete(0);
  c.k = 0;
  EXPECT_THROW(c.validate(), ArgumentError);
  c = AttackConfig::discrete(0, 1.5);
  EXPECT_THROW(c.validate(), ArgumentError);
  c = AttackConfig::continuous({2.0, 0.0});
  EXPECT_THROW(c.validate(), ArgumentError);
  c = AttackConfig::continuous({});
  EXPECT_THROW(c.validate(), ArgumentError);
}

TEST(Compliance, DefaultThresholdMatchesEvaluationRegion) {
  auto c = AttackConfig::continuous({-1.0, -1.0}, 0.01, 8);
  EXPECT_TRUE(wrapper_compliant(0.2, c));
  EXPECT_FALSE(wrapper_compliant(0.21, c));
  c.verbatim_alg1 = true;  // k * L <= tau_eval
  EXPECT_TRUE(wrapper_compliant(0.025, c));
  EXPECT_FALSE(wrapper_compliant(0.03, c));
  c.tau_wrap = 0.0;
  EXPECT_TRUE(wrapper_compliant(0.0, c));
  EXPECT_FALSE(wrapper_compliant(1e-9, c));
}

TEST(DazeDuration, IsCeilingOfKTimesLoss) {
  const auto c = AttackConfig::continuous({-1.0, -1.0}, 0.01, 8);
  EXPECT_EQ(daze_duration(0.3, c), 3u);
  EXPECT_EQ(daze_duration(0.25, c), 2u);
  EXPECT_EQ(daze_duration(2.0, c), 16u);
  EXPECT_EQ(daze_duration(1.0, AttackConfig::discrete(0, 0.003, 4)), 4u);
}

TEST(DazeWrapper, StepBeforeResetIsAProtocolError) {
  DazeWrapper<CounterSim> w(CounterSim{}, AttackConfig::discrete(0), 1);
  EXPECT_THROW(w.step(0), ProtocolError);
}

TEST(DazeWrapper, TriggerFrequencyWithinThreeSigma) {
  for (double beta : {0.003, 0.01, 0.1}) {
    DazeWrapper<CounterSim> w(CounterSim{}, AttackConfig::discrete(0, beta, 8), 17);
    w.reset(0);
    std::size_t trials = 0, triggers = 0;
    for (int i = 0; i < 100000; ++i) {
      const auto s = w.step(0);  // always complies, so no dazes
      if (s.record.executed == ExecutedKind::chosen) {
        ++trials;
        triggers += s.record.tag_out == Tag::triggered;
      }
    }
    const double n = static_cast<double>(trials);
    const double sigma = std::sqrt(beta * (1 - beta) / n);
    EXPECT_NEAR(static_cast<double>(triggers) / n, beta, 3 * sigma) << "beta " << beta;
  }
}

TEST(DazeWrapper, NullTransitionLeavesSimulatorUntouched) {
  DazeWrapper<GridworldSim> w(GridworldSim(open_grid()), AttackConfig::discrete(grid_action::stay, 0.2, 8), 3);
  w.reset(5);
  std::size_t nulls = 0;
  for (int i = 0; i < 5000 && nulls < 50; ++i) {
    const auto before = w.simulator().snapshot();
    const auto held = w.state().held_observation;
    const bool pending = w.state().trigger_pending;
    const auto s = w.step(pending ? grid_action::stay : grid_action::right);
    if (s.done) w.reset(static_cast<std::uint64_t>(i));
    if (!pending) continue;
    ASSERT_EQ(s.record.executed, ExecutedKind::null_transition);
    EXPECT_EQ(w.simulator().snapshot(), before);
    EXPECT_FALSE(s.record.sim_stepped);
    EXPECT_FALSE(s.record.action_executed.has_value());
    EXPECT_EQ(s.observation.base, *held);
    EXPECT_EQ(s.observation.tag, Tag::benign);
    ++nulls;
  }
  EXPECT_EQ(nulls, 50u);
}

TEST(DazeWrapper, ContinuousDazeLengthsMatchCeilKL) {
  auto config = AttackConfig::continuous({-1.0, -1.0}, 0.05, 8);
  PointMassSpec spec;
  spec.goal_radius = 1e-6;  // keep episodes long
  spec.episode_cap = 1000000;
  DazeWrapper<PointMassSim> w(PointMassSim(spec), config, 9);
  w.reset(2);
  const std::vector<std::vector<double>> defiant{{-0.7, -1.0}, {-0.75, -0.9}, {0.0, -1.0}, {1.0, 1.0}};
  std::size_t checked = 0;
  for (int i = 0; i < 200000 && checked < 40; ++i) {
    if (!w.state().trigger_pending) {
      w.step({0.0, 0.0});
      continue;
    }
    const auto& a = defiant[checked % defiant.size()];
    const double loss = adv_loss(a, config);
    const auto expected = static_cast<std::size_t>(std::ceil(8 * loss));
    auto s = w.step(a);
    ASSERT_EQ(s.record.daze_assigned, expected);
    std::size_t uniform = 1, dazed_tags = s.record.tag_out == Tag::dazed;
    while (w.state().daze_counter > 0) {
      s = w.step({0.0, 0.0});
      ASSERT_EQ(s.record.executed, ExecutedKind::uniform_sample);
      ++uniform;
      dazed_tags += s.record.tag_out == Tag::dazed;
    }
    EXPECT_EQ(uniform, expected);
    EXPECT_EQ(dazed_tags, expected - 1);
    EXPECT_EQ(s.observation.tag, Tag::benign);
    ++checked;
  }
  EXPECT_EQ(checked, 40u);
}

TEST(DazeWrapper, DiscreteDefianceDazesForKSteps) {
  for (int k : {1, 4, 8, 16}) {
    DazeWrapper<GridworldSim> w(GridworldSim(open_grid()), AttackConfig::discrete(grid_action::stay, 0.1, k), 4);
    w.reset(0);
    int seen = 0;
    while (seen < 10) {
      const bool pending = w.state().trigger_pending;
      auto s = w.step(grid_action::left);
      if (!pending) continue;
      ASSERT_EQ(s.record.daze_assigned, static_cast<std::size_t>(k));
      int uniform = 1;
      while (w.state().daze_counter > 0) {
        s = w.step(grid_action::left);
        ++uniform;
      }
      EXPECT_EQ(uniform, k);
      ++seen;
    }
  }
}

TEST(DazeWrapper, NoTriggerOnTerminalObservation) {
  GridworldSpec spec;
  spec.slip = 0.0;
  spec.start = {3, 4};
  DazeWrapper<GridworldSim> w(GridworldSim(spec), AttackConfig::discrete(grid_action::stay, 1.0, 8), 0);
  w.reset(0);
  const auto s = w.step(grid_action::right);
  EXPECT_TRUE(s.done);
  EXPECT_EQ(s.observation.tag, Tag::benign);
  EXPECT_THROW(w.step(grid_action::right), ProtocolError);
}

TEST(DazeWrapper, ReplaysIdenticallyFromSeed) {
  auto run = [] {
    DazeWrapper<GridworldSim> w(GridworldSim(open_grid()), AttackConfig::discrete(grid_action::stay, 0.05, 8), 11);
    std::ostringstream log;
    w.reset(1);
    for (int i = 0; i < 2000; ++i) write_record(log, w.step(static_cast<std::size_t>(i % 5)).record);
    return log.str();
  };
  EXPECT_EQ(run(), run());
}

TEST(DazeEnv, NullTransitionScoredAsTargetWithNoMotion) {
  GridworldSpec spec = open_grid();
  const RewardFn<std::size_t, std::size_t> reward = [spec](const std::size_t& p, const std::size_t& a,
                                                           const std::size_t& n) {
    return gridworld_reward(spec, p, a, n);
  };
  DazeEnv<GridworldSim> env(GridworldSim(spec), AttackConfig::discrete(grid_action::stay, 0.5, 8), 2, reward);
  env.reset(0);
  int nulls = 0;
  for (int i = 0; i < 200 && nulls < 5; ++i) {
    const bool pending = env.wrapper().state().trigger_pending;
    const auto t = env.step(pending ? grid_action::stay : grid_action::down);
    if (t.record.executed != ExecutedKind::null_transition) continue;
    EXPECT_EQ(t.record.observation_in.base, t.observation.base);
    EXPECT_DOUBLE_EQ(t.reward, spec.step_penalty);
    ++nulls;
  }
  EXPECT_EQ(nulls, 5);
}

TEST(DazeEnv, ZeroBetaIsStepForStepIdenticalToCleanTraining) {
  const GridworldSpec spec;
  const RewardFn<std::size_t, std::size_t> reward = [spec](const std::size_t& p, const std::size_t& a,
                                                           const std::size_t& n) {
    return gridworld_reward(spec, p, a, n);
  };
  QLearnConfig q;
  q.total_steps = 50000;
  q.seed = 8;
  std::vector<StepRecord<std::size_t, std::size_t>> clean_log, wrapped_log;
  CleanEnv<GridworldSim> clean(GridworldSim(spec), reward);
  DazeEnv<GridworldSim> wrapped(GridworldSim(spec), AttackConfig::discrete(grid_action::stay, 0.0, 8), 99, reward);
  const auto a = q_learning_train(clean, spec.n_states(), 5, q, [&](const auto& r) { clean_log.push_back(r); });
  const auto b = q_learning_train(wrapped, spec.n_states(), 5, q, [&](const auto& r) { wrapped_log.push_back(r); });
  ASSERT_EQ(clean_log.size(), wrapped_log.size());
  for (std::size_t i = 0; i < clean_log.size(); ++i) ASSERT_EQ(clean_log[i], wrapped_log[i]) << "step " << i;
  EXPECT_EQ(a.q, b.q);
  EXPECT_EQ(a.policy, b.policy);
}

TEST(StepLog, WritesOneJsonObjectPerLine) {
  StepRecord<std::vector<double>, std::vector<double>> r;
  r.observation_in = {{0.5, -1.0}, Tag::benign};
  r.action_chosen = {1.0, 0.25};
  r.executed = ExecutedKind::null_transition;
  r.observation_out = {{0.5, -1.0}, Tag::benign};
  r.sim_stepped = false;
  std::ostringstream out;
  write_record(out, r);
  const std::string line = out.str();
  EXPECT_EQ(line.back(), '\n');
  EXPECT_NE(line.find("\"executed\":\"null\""), std::string::npos);
  EXPECT_NE(line.find("\"action_executed\":null"), std::string::npos);
  EXPECT_NE(line.find("[0.5,-1]"), std::string::npos);
}

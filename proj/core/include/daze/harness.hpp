#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <type_traits>
#include <utility>
#include <vector>

#include "daze/wrapper.hpp"

namespace daze {

/// What the learner sees after one step. The reward is computed victim-side.
template <class Obs, class Act>
struct Transition {
  Observation<Obs> observation;
  double reward = 0.0;
  bool done = false;
  /// Set when the training harness replaced the agent's action; learners
  /// then credit the replacement instead of their own choice.
  std::optional<Act> forced_action;
  StepRecord<Obs, Act> record;
};

template <class Obs, class Act>
struct EpisodeStep {
  Observation<Obs> observation;
  Act action{};
  double reward = 0.0;
  Observation<Obs> next_observation;
  bool done = false;
};

template <class Obs, class Act>
using RewardFn = std::function<double(const Obs& prev, const Act& action, const Obs& next)>;

template <class Obs, class Act>
using StepSink = std::function<void(const StepRecord<Obs, Act>&)>;

/// Environment as seen by a learner: observation, victim reward, done flag.
template <class Obs, class Act>
class TrainingEnv {
 public:
  using observation_type = Obs;
  using action_type = Act;

  virtual ~TrainingEnv() = default;

  virtual Observation<Obs> reset(std::uint64_t seed) = 0;
  virtual Transition<Obs, Act> step(const Act& action) = 0;

  /// Outer-loop poisoners rewrite finished episodes; learners must then
  /// defer updates until finish_episode has run.
  virtual bool buffers_episodes() const { return false; }
  virtual void finish_episode(std::vector<EpisodeStep<Obs, Act>>&) {}
};

using DiscreteTrainingEnv = TrainingEnv<std::size_t, std::size_t>;
using ContinuousTrainingEnv = TrainingEnv<std::vector<double>, std::vector<double>>;

template <class Act>
Act target_action_of(const AttackConfig& config) {
  if constexpr (std::is_same_v<Act, std::size_t>) {
    return config.target_index;
  } else {
    return Act(config.target_vector.begin(), config.target_vector.end());
  }
}

/// Unpoisoned training: the simulator plus the victim reward.
template <Simulator Sim>
class CleanEnv final : public TrainingEnv<typename Sim::observation_type, typename Sim::action_type> {
 public:
  using Obs = typename Sim::observation_type;
  using Act = typename Sim::action_type;

  CleanEnv(Sim sim, RewardFn<Obs, Act> reward) : sim_(std::move(sim)), reward_(std::move(reward)) {}

  Observation<Obs> reset(std::uint64_t seed) override {
    last_ = Observation<Obs>{sim_.reset(seed), Tag::benign};
    return last_;
  }

  Transition<Obs, Act> step(const Act& action) override {
    auto out = sim_.step(action);
    Transition<Obs, Act> t;
    t.observation = Observation<Obs>{std::move(out.observation), Tag::benign};
    t.reward = reward_(last_.base, action, t.observation.base);
    t.done = out.done;
    t.record.observation_in = last_;
    t.record.action_chosen = action;
    t.record.action_executed = action;
    t.record.observation_out = t.observation;
    t.record.done = out.done;
    last_ = t.observation;
    return t;
  }

  const Sim& simulator() const noexcept { return sim_; }

 private:
  Sim sim_;
  RewardFn<Obs, Act> reward_;
  Observation<Obs> last_{};
};

/// Training through the daze wrapper. The wrapper never sees the reward;
/// this harness computes it from the observation pair it returns. Null
/// transitions are scored as (held, a+, held).
template <Simulator Sim>
class DazeEnv final : public TrainingEnv<typename Sim::observation_type, typename Sim::action_type> {
 public:
  using Obs = typename Sim::observation_type;
  using Act = typename Sim::action_type;

  DazeEnv(Sim sim, AttackConfig config, std::uint64_t wrapper_seed, RewardFn<Obs, Act> reward)
      : wrapper_(std::move(sim), std::move(config), wrapper_seed),
        reward_(std::move(reward)),
        target_(target_action_of<Act>(wrapper_.config())) {}

  Observation<Obs> reset(std::uint64_t seed) override { return wrapper_.reset(seed); }

  Transition<Obs, Act> step(const Act& action) override {
    auto out = wrapper_.step(action);
    Transition<Obs, Act> t;
    const Act& scored = out.record.executed == ExecutedKind::null_transition ? target_ : *out.record.action_executed;
    t.reward = reward_(out.record.observation_in.base, scored, out.observation.base);
    t.observation = std::move(out.observation);
    t.done = out.done;
    t.record = std::move(out.record);
    return t;
  }

  const DazeWrapper<Sim>& wrapper() const noexcept { return wrapper_; }

 private:
  DazeWrapper<Sim> wrapper_;
  RewardFn<Obs, Act> reward_;
  Act target_;
};

}  // namespace daze

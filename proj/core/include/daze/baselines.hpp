#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <type_traits>
#include <vector>

#include "daze/error.hpp"
#include "daze/harness.hpp"
#include "daze/rng.hpp"

namespace daze {

enum class BaselineKind { static_reward, dynamic_reward };

const char* to_string(BaselineKind kind);

/// Reward-poisoning baselines. Unlike the daze wrapper these need write
/// access to the reward stream.
struct BaselineConfig {
  BaselineKind kind = BaselineKind::static_reward;
  double beta = 0.003;
  double c = 5.0;
  double alpha = 1.0;
  bool strong_action_manipulation = true;
  /// Every `manipulation_period`-th poisoned step executes a+ (2 = alternate).
  std::size_t manipulation_period = 2;
  /// Poison finished episodes instead of individual steps.
  bool outer_loop = false;
  /// Victim discount assumed by the dynamic rule.
  double gamma = 0.99;
  LossKind loss_kind = LossKind::discrete_indicator;
  std::size_t target_index = 0;
  std::vector<double> target_vector;

  void validate() const;
  /// The same target as an attack config, for loss evaluation.
  AttackConfig as_attack() const;
};

/// 1 for a+ (discrete) or 1 - ||a - a+||_inf / 2 (continuous, in [0, 1]).
double compliance(std::size_t action, const BaselineConfig& config);
double compliance(std::span<const double> action, const BaselineConfig& config);

/// Static rule: +c / -c on the target indicator, -c * ||a - a+||_inf for
/// continuous actions (a pure penalty).
double static_poison_reward(std::size_t action, const BaselineConfig& config);
double static_poison_reward(std::span<const double> action, const BaselineConfig& config);

/// Dynamic rule r' = (1 - alpha) r + alpha (c * compliance - gamma * V(next)).
/// Throws ConfigError without a value estimate.
double dynamic_poison_reward(double compliance_value, double reward, std::optional<double> next_value,
                             const BaselineConfig& config);

template <class Act>
struct PoisonedStep {
  Act action{};  ///< executed action
  double reward = 0.0;
  bool forced = false;
};

template <class Act>
PoisonedStep<Act> static_poison_step(PoisonedStep<Act> step, const BaselineConfig& config) {
  step.reward = static_poison_reward(step.action, config);
  return step;
}

template <class Act>
PoisonedStep<Act> dynamic_poison_step(PoisonedStep<Act> step, std::optional<double> next_value,
                                      const BaselineConfig& config) {
  step.reward = dynamic_poison_reward(compliance(step.action, config), step.reward, next_value, config);
  return step;
}

/// Harness-side estimate of the victim's state value, learned by TD(0) on
/// unpoisoned rewards.
template <class Obs>
class ValueEstimator {
 public:
  virtual ~ValueEstimator() = default;
  virtual double value(const Obs& observation) const = 0;
  virtual void update(const Obs& observation, double reward, const Obs& next, bool done) = 0;
};

class TabularValueEstimator final : public ValueEstimator<std::size_t> {
 public:
  TabularValueEstimator(std::size_t n_states, double gamma, double learning_rate = 0.1);
  double value(const std::size_t& observation) const override;
  void update(const std::size_t& observation, double reward, const std::size_t& next, bool done) override;

 private:
  std::vector<double> v_;
  double gamma_;
  double learning_rate_;
};

/// Linear in (observation, 1).
class LinearValueEstimator final : public ValueEstimator<std::vector<double>> {
 public:
  LinearValueEstimator(std::size_t dim, double gamma, double learning_rate = 0.01);
  double value(const std::vector<double>& observation) const override;
  void update(const std::vector<double>& observation, double reward, const std::vector<double>& next,
              bool done) override;
  const std::vector<double>& weights() const noexcept { return w_; }

 private:
  std::vector<double> w_;
  double gamma_;
  double learning_rate_;
};

/// Training with a reward poisoner. Inner-loop mode triggers the next
/// observation with probability beta after a benign step and poisons the
/// step taken from it; outer-loop mode picks and poisons steps of finished
/// episodes.
template <Simulator Sim>
class PoisonEnv final : public TrainingEnv<typename Sim::observation_type, typename Sim::action_type> {
 public:
  using Obs = typename Sim::observation_type;
  using Act = typename Sim::action_type;

  PoisonEnv(Sim sim, BaselineConfig config, std::uint64_t seed, RewardFn<Obs, Act> reward,
            std::unique_ptr<ValueEstimator<Obs>> value = nullptr)
      : sim_(std::move(sim)), config_(std::move(config)), reward_(std::move(reward)), value_(std::move(value)) {
    config_.validate();
    if (config_.kind == BaselineKind::dynamic_reward && !value_) {
      throw ConfigError("attack.kind", "dynamic poisoning needs a value estimate");
    }
    const Rng root(seed);
    trigger_rng_ = root.split("poison.trigger");
    const AttackConfig attack = config_.as_attack();
    target_ = target_action_of<Act>(attack);
  }

  Observation<Obs> reset(std::uint64_t seed) override {
    last_ = Observation<Obs>{sim_.reset(seed), Tag::benign};
    return last_;
  }

  Transition<Obs, Act> step(const Act& action) override {
    const bool poisoned = last_.tag == Tag::triggered;
    PoisonedStep<Act> p{action, 0.0, false};
    if (poisoned && config_.strong_action_manipulation && poisoned_steps_ % config_.manipulation_period == 0) {
      p.action = target_;
      p.forced = true;
    }
    auto out = sim_.step(p.action);
    const double true_reward = reward_(last_.base, p.action, out.observation);
    if (value_) value_->update(last_.base, true_reward, out.observation, out.done);
    p.reward = true_reward;
    if (poisoned) {
      ++poisoned_steps_;
      if (config_.kind == BaselineKind::static_reward) {
        p = static_poison_step(p, config_);
      } else {
        p = dynamic_poison_step(p, value_->value(out.observation), config_);
      }
    }

    Tag tag = Tag::benign;
    if (!config_.outer_loop && !poisoned && !out.done && trigger_rng_.uniform() < config_.beta) tag = Tag::triggered;

    Transition<Obs, Act> t;
    t.observation = Observation<Obs>{std::move(out.observation), tag};
    t.reward = p.reward;
    t.done = out.done;
    if (p.forced) t.forced_action = p.action;
    t.record.observation_in = last_;
    t.record.action_chosen = action;
    t.record.action_executed = p.action;
    t.record.observation_out = t.observation;
    t.record.tag_out = tag;
    t.record.done = out.done;
    last_ = t.observation;
    return t;
  }

  bool buffers_episodes() const override { return config_.outer_loop; }

  void finish_episode(std::vector<EpisodeStep<Obs, Act>>& episode) override {
    if (!config_.outer_loop) return;
    for (auto& s : episode) {
      if (trigger_rng_.uniform() >= config_.beta) continue;
      ++poisoned_steps_;
      s.observation.tag = Tag::triggered;
      PoisonedStep<Act> p{s.action, s.reward, false};
      if (config_.kind == BaselineKind::static_reward) {
        p = static_poison_step(p, config_);
      } else {
        p = dynamic_poison_step(p, value_->value(s.next_observation.base), config_);
      }
      s.reward = p.reward;
    }
  }

  std::size_t poisoned_steps() const noexcept { return poisoned_steps_; }
  const BaselineConfig& config() const noexcept { return config_; }

 private:
  Sim sim_;
  BaselineConfig config_;
  RewardFn<Obs, Act> reward_;
  std::unique_ptr<ValueEstimator<Obs>> value_;
  Rng trigger_rng_;
  Act target_{};
  Observation<Obs> last_{};
  std::size_t poisoned_steps_ = 0;
};

}  // namespace daze

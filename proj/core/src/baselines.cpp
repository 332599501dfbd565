#include "daze/baselines.hpp"

#include <algorithm>

namespace daze {

const char* to_string(BaselineKind kind) {
  return kind == BaselineKind::static_reward ? "static" : "dynamic";
}

void BaselineConfig::validate() const {
  if (!(beta >= 0.0 && beta <= 1.0)) throw ConfigError("attack.beta", "must lie in [0, 1]");
  if (!(c > 0.0)) throw ConfigError("attack.c", "must be positive");
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw ConfigError("attack.alpha", "must lie in [0, 1]");
  if (manipulation_period == 0) throw ConfigError("attack.manipulation_period", "must be positive");
  if (!(gamma > 0.0 && gamma < 1.0)) throw ConfigError("attack.gamma", "must lie in (0, 1)");
  if (loss_kind == LossKind::continuous_sup_norm && target_vector.empty()) {
    throw ConfigError("attack.target", "continuous poisoning needs a target action vector");
  }
}

AttackConfig BaselineConfig::as_attack() const {
  AttackConfig a;
  a.beta = beta;
  a.loss_kind = loss_kind;
  a.target_index = target_index;
  a.target_vector = target_vector;
  return a;
}

double compliance(std::size_t action, const BaselineConfig& config) {
  return action == config.target_index ? 1.0 : 0.0;
}

double compliance(std::span<const double> action, const BaselineConfig& config) {
  return std::max(0.0, 1.0 - adv_loss(action, config.as_attack()) / 2.0);
}

double static_poison_reward(std::size_t action, const BaselineConfig& config) {
  return action == config.target_index ? config.c : -config.c;
}

double static_poison_reward(std::span<const double> action, const BaselineConfig& config) {
  return -config.c * adv_loss(action, config.as_attack());
}

double dynamic_poison_reward(double compliance_value, double reward, std::optional<double> next_value,
                             const BaselineConfig& config) {
  if (!next_value) throw ConfigError("attack.kind", "dynamic poisoning needs a value estimate");
  return (1.0 - config.alpha) * reward + config.alpha * (config.c * compliance_value - config.gamma * *next_value);
}

TabularValueEstimator::TabularValueEstimator(std::size_t n_states, double gamma, double learning_rate)
    : v_(n_states, 0.0), gamma_(gamma), learning_rate_(learning_rate) {}

double TabularValueEstimator::value(const std::size_t& observation) const { return v_.at(observation); }

void TabularValueEstimator::update(const std::size_t& observation, double reward, const std::size_t& next,
                                   bool done) {
  const double target = reward + (done ? 0.0 : gamma_ * v_.at(next));
  v_.at(observation) += learning_rate_ * (target - v_.at(observation));
}

LinearValueEstimator::LinearValueEstimator(std::size_t dim, double gamma, double learning_rate)
    : w_(dim + 1, 0.0), gamma_(gamma), learning_rate_(learning_rate) {}

double LinearValueEstimator::value(const std::vector<double>& observation) const {
  if (observation.size() + 1 != w_.size()) throw ArgumentError("value estimate dimension mismatch");
  double v = w_.back();
  for (std::size_t i = 0; i < observation.size(); ++i) v += w_[i] * observation[i];
  return v;
}

void LinearValueEstimator::update(const std::vector<double>& observation, double reward,
                                  const std::vector<double>& next, bool done) {
  const double target = reward + (done ? 0.0 : gamma_ * value(next));
  const double error = target - value(observation);
  for (std::size_t i = 0; i < observation.size(); ++i) w_[i] += learning_rate_ * error * observation[i];
  w_.back() += learning_rate_ * error;
}

}  // namespace daze

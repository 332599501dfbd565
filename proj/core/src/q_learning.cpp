#include "daze/q_learning.hpp"

#include <algorithm>

#include "daze/error.hpp"
#include "daze/rng.hpp"

namespace daze {
namespace {

std::size_t greedy(const std::vector<double>& q, std::size_t row, std::size_t m) {
  std::size_t best = 0;
  for (std::size_t a = 1; a < m; ++a) {
    if (q[row * m + a] > q[row * m + best]) best = a;
  }
  return best;
}

double max_q(const std::vector<double>& q, std::size_t row, std::size_t m) { return q[row * m + greedy(q, row, m)]; }

}  // namespace

void QLearnConfig::validate() const {
  if (!(learning_rate >= 0.0 && learning_rate <= 1.0)) throw ConfigError("train.learning_rate", "must lie in [0, 1]");
  if (!(epsilon_initial >= 0.0 && epsilon_initial <= 1.0)) throw ConfigError("train.epsilon_initial", "must lie in [0, 1]");
  if (!(epsilon_final >= 0.0 && epsilon_final <= 1.0)) throw ConfigError("train.epsilon_final", "must lie in [0, 1]");
  if (!(gamma > 0.0 && gamma < 1.0)) throw ConfigError("train.gamma", "must lie in (0, 1)");
  if (total_steps == 0) throw ConfigError("train.total_steps", "must be positive");
}

double QLearnConfig::epsilon(std::size_t step) const {
  if (epsilon_decay_steps == 0 || step >= epsilon_decay_steps) return epsilon_final;
  const double f = static_cast<double>(step) / static_cast<double>(epsilon_decay_steps);
  return epsilon_initial + f * (epsilon_final - epsilon_initial);
}

QLearnResult q_learning_train(DiscreteTrainingEnv& env, std::size_t n_states, std::size_t n_actions,
                              const QLearnConfig& config, const StepSink<std::size_t, std::size_t>& sink) {
  config.validate();
  if (n_states == 0 || n_actions == 0) throw ArgumentError("Q-learning needs states and actions");
  const std::size_t m = n_actions;
  std::vector<double> q(3 * n_states * m, config.initial_q);
  std::vector<std::uint32_t> visits(config.visit_count_rate ? q.size() : 0, 0);
  const Rng root(config.seed);
  Rng explore = root.split("q_learning.explore");
  Rng episodes = root.split("q_learning.episodes");

  auto update = [&](const EpisodeStep<std::size_t, std::size_t>& s) {
    const std::size_t row = tagged_index(s.observation.base, s.observation.tag);
    const std::size_t next_row = tagged_index(s.next_observation.base, s.next_observation.tag);
    if (row >= 3 * n_states || next_row >= 3 * n_states || s.action >= m) {
      throw ArgumentError("observation or action out of range for the Q table");
    }
    const double target = s.reward + (s.done ? 0.0 : config.gamma * max_q(q, next_row, m));
    const std::size_t i = row * m + s.action;
    double rate = config.learning_rate;
    if (config.visit_count_rate) rate = std::max(rate, 1.0 / static_cast<double>(++visits[i]));
    q[i] += rate * (target - q[i]);
  };

  QLearnResult result{TabularPolicy::uniform(1, 1), {}, {}, 0};
  std::vector<EpisodeStep<std::size_t, std::size_t>> buffer;
  const bool buffered = env.buffers_episodes();
  auto obs = env.reset(episodes.next_u64());
  EpisodeLog current;
  for (std::size_t step = 0; step < config.total_steps; ++step) {
    const std::size_t row = tagged_index(obs.base, obs.tag);
    std::size_t action;
    if (explore.uniform() < config.epsilon(step)) {
      action = explore.index(m);
    } else {
      action = greedy(q, row, m);
    }
    auto t = env.step(action);
    if (sink) sink(t.record);
    EpisodeStep<std::size_t, std::size_t> s{obs, t.forced_action.value_or(action), t.reward, t.observation, t.done};
    if (buffered) {
      buffer.push_back(s);
    } else {
      update(s);
    }
    current.episode_return += t.reward;
    ++current.length;
    obs = t.observation;
    if (t.done) {
      if (buffered) {
        env.finish_episode(buffer);
        for (const auto& b : buffer) update(b);
        buffer.clear();
      }
      result.episodes.push_back(current);
      current = {};
      obs = env.reset(episodes.next_u64());
    }
  }

  std::vector<std::size_t> actions(3 * n_states);
  for (std::size_t row = 0; row < actions.size(); ++row) actions[row] = greedy(q, row, m);
  result.policy = TabularPolicy::deterministic(actions, m);
  result.q = std::move(q);
  result.steps = config.total_steps;
  return result;
}

}  // namespace daze

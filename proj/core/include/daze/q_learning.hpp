#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "daze/harness.hpp"
#include "daze/mdp.hpp"

namespace daze {

/// Tabular observations are (state, tag) pairs flattened as state * 3 + tag.
inline std::size_t tagged_index(std::size_t state, Tag tag) { return state * 3 + static_cast<std::size_t>(tag); }

struct QLearnConfig {
  double learning_rate = 0.1;
  /// Use step size max(learning_rate, 1 / n(s, a)) so the first update of
  /// each entry replaces its initial value.
  bool visit_count_rate = false;
  double epsilon_initial = 1.0;
  double epsilon_final = 0.05;
  std::size_t epsilon_decay_steps = 100000;
  double gamma = 0.99;
  /// Starting value of every Q entry; values above the achievable return
  /// make untried actions look attractive.
  double initial_q = 0.0;
  std::size_t total_steps = 200000;
  std::uint64_t seed = 0;

  void validate() const;
  /// Linear decay from initial to final over epsilon_decay_steps.
  double epsilon(std::size_t step) const;
};

struct EpisodeLog {
  double episode_return = 0.0;
  std::size_t length = 0;
};

struct QLearnResult {
  TabularPolicy policy;  ///< greedy over 3 * n_states tagged observations
  std::vector<double> q;
  std::vector<EpisodeLog> episodes;
  std::size_t steps = 0;
};

/// One-step Q-learning with epsilon-greedy exploration. Greedy ties go to
/// the lowest action index. Every step record is passed to `sink` if set.
QLearnResult q_learning_train(DiscreteTrainingEnv& env, std::size_t n_states, std::size_t n_actions,
                              const QLearnConfig& config,
                              const StepSink<std::size_t, std::size_t>& sink = {});

}  // namespace daze

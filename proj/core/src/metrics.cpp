#include "daze/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>

#include "daze/error.hpp"
#include "daze/q_learning.hpp"

namespace daze {
namespace {

std::size_t sample_row(const TabularPolicy& policy, std::size_t row, Rng& rng) {
  const auto probs = policy.row(row);
  double u = rng.uniform();
  for (std::size_t a = 0; a + 1 < probs.size(); ++a) {
    if (u < probs[a]) return a;
    u -= probs[a];
  }
  return probs.size() - 1;
}

void check_tagged(const TabularPolicy& policy, std::size_t n_states) {
  if (policy.n_states() != 3 * n_states) {
    throw ArgumentError("policy must cover the benign, triggered and dazed copy of every state");
  }
}

std::vector<double> ranks(std::span<const double> v) {
  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> r(v.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
    const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t t = i; t <= j; ++t) r[order[t]] = avg;
    i = j + 1;
  }
  return r;
}

}  // namespace

const char* to_string(EvalStateMode mode) {
  return mode == EvalStateMode::visitation ? "visitation" : "uniform";
}

MeanStd mean_std(std::span<const double> values) {
  MeanStd out;
  if (values.empty()) return out;
  for (double v : values) out.mean += v;
  out.mean /= static_cast<double>(values.size());
  double sq = 0.0;
  for (double v : values) sq += (v - out.mean) * (v - out.mean);
  out.std = std::sqrt(sq / static_cast<double>(values.size()));
  return out;
}

std::vector<std::size_t> eval_states(const TabularPolicy& policy, const GridworldSpec& spec,
                                     std::size_t n_trajectories, EvalStateMode mode, std::uint64_t seed) {
  check_tagged(policy, spec.n_states());
  std::vector<std::size_t> states;
  if (mode == EvalStateMode::uniform) {
    const auto mdp = to_tabular(spec);
    std::vector<bool> seen(spec.n_states(), false);
    std::queue<std::size_t> frontier;
    const std::size_t start = spec.index(spec.start);
    const std::size_t goal = spec.index(spec.goal);
    seen[start] = true;
    frontier.push(start);
    while (!frontier.empty()) {
      const std::size_t s = frontier.front();
      frontier.pop();
      if (s != goal) states.push_back(s);
      for (std::size_t a = 0; a < mdp.n_actions(); ++a) {
        for (std::size_t next = 0; next < mdp.n_states(); ++next) {
          if (mdp.transition(s, a, next) > 0.0 && !seen[next]) {
            seen[next] = true;
            frontier.push(next);
          }
        }
      }
    }
    std::sort(states.begin(), states.end());
    return states;
  }

  const Rng root(seed);
  Rng episodes = root.split("eval.episodes");
  Rng actions = root.split("eval.actions");
  GridworldSim sim(spec);
  for (std::size_t e = 0; e < n_trajectories; ++e) {
    std::size_t s = sim.reset(episodes.next_u64());
    for (;;) {
      const auto out = sim.step(sample_row(policy, tagged_index(s, Tag::benign), actions));
      if (out.done) break;
      s = out.observation;
      states.push_back(s);
    }
  }
  return states;
}

double compute_asr(const TabularPolicy& policy, std::span<const std::size_t> states, std::size_t target) {
  if (target >= policy.n_actions()) throw ArgumentError("target action out of range");
  if (states.empty()) return 0.0;
  double sum = 0.0;
  for (std::size_t s : states) sum += policy.prob(tagged_index(s, Tag::triggered), target);
  return sum / static_cast<double>(states.size());
}

MeanStd compute_br(const TabularPolicy& policy, const GridworldSpec& spec, std::size_t n_episodes,
                   std::uint64_t seed) {
  check_tagged(policy, spec.n_states());
  const Rng root(seed);
  Rng episodes = root.split("br.episodes");
  Rng actions = root.split("br.actions");
  GridworldSim sim(spec);
  std::vector<double> returns;
  for (std::size_t e = 0; e < n_episodes; ++e) {
    std::size_t s = sim.reset(episodes.next_u64());
    double total = 0.0;
    for (;;) {
      const std::size_t a = sample_row(policy, tagged_index(s, Tag::benign), actions);
      const auto out = sim.step(a);
      total += gridworld_reward(spec, s, a, out.observation);
      s = out.observation;
      if (out.done) break;
    }
    returns.push_back(total);
  }
  return mean_std(returns);
}

std::vector<std::vector<double>> eval_states(const GaussianPolicy& policy, const PointMassSpec& spec,
                                             std::size_t n_trajectories, EvalStateMode mode, std::uint64_t seed) {
  const Rng root(seed);
  std::vector<std::vector<double>> states;
  if (mode == EvalStateMode::uniform) {
    // Ten draws per requested trajectory keeps the two modes comparable in size.
    Rng draws = root.split("eval.uniform");
    for (std::size_t i = 0; i < 10 * n_trajectories; ++i) {
      std::vector<double> obs(4);
      for (auto& x : obs) x = draws.uniform(-1.0, 1.0);
      states.push_back(std::move(obs));
    }
    return states;
  }
  Rng episodes = root.split("eval.episodes");
  Rng actions = root.split("eval.actions");
  PointMassSim sim(spec);
  for (std::size_t e = 0; e < n_trajectories; ++e) {
    auto obs = sim.reset(episodes.next_u64());
    for (;;) {
      const auto out = sim.step(policy.sample(policy_features({obs, Tag::benign}), actions).action);
      if (out.done) break;
      obs = out.observation;
      states.push_back(obs);
    }
  }
  return states;
}

double compute_asr(const GaussianPolicy& policy, std::span<const std::vector<double>> states,
                   const AttackConfig& config, std::size_t samples_per_state, std::uint64_t seed) {
  if (!(config.tau_eval > 0.0)) throw ArgumentError("tau_eval must be positive");
  if (samples_per_state == 0) throw ArgumentError("samples_per_state must be positive");
  if (states.empty()) return 0.0;
  Rng rng = Rng(seed).split("asr.actions");
  std::size_t hits = 0;
  for (const auto& obs : states) {
    const auto features = policy_features({obs, Tag::triggered});
    for (std::size_t i = 0; i < samples_per_state; ++i) {
      const auto action = policy.sample(features, rng).action;
      if (adv_loss(action, config) <= config.tau_eval) ++hits;
    }
  }
  return static_cast<double>(hits) / static_cast<double>(states.size() * samples_per_state);
}

MeanStd compute_br(const GaussianPolicy& policy, const PointMassSpec& spec, std::size_t n_episodes,
                   std::uint64_t seed) {
  Rng episodes = Rng(seed).split("br.episodes");
  PointMassSim sim(spec);
  std::vector<double> returns;
  for (std::size_t e = 0; e < n_episodes; ++e) {
    auto obs = sim.reset(episodes.next_u64());
    double total = 0.0;
    for (;;) {
      const auto action = policy.mean_action(policy_features({obs, Tag::benign}));
      auto out = sim.step(action);
      total += point_mass_reward(spec, obs, action, out.observation);
      obs = std::move(out.observation);
      if (out.done) break;
    }
    returns.push_back(total);
  }
  return mean_std(returns);
}

double spearman(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw ArgumentError("spearman needs equal-length samples");
  if (x.size() < 2) return 0.0;
  const auto rx = ranks(x);
  const auto ry = ranks(y);
  const MeanStd mx = mean_std(rx);
  const MeanStd my = mean_std(ry);
  if (mx.std == 0.0 || my.std == 0.0) return 0.0;
  double cov = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) cov += (rx[i] - mx.mean) * (ry[i] - my.mean);
  cov /= static_cast<double>(rx.size());
  return cov / (mx.std * my.std);
}

}  // namespace daze

#include "daze/mdp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "daze/error.hpp"

namespace daze {
namespace {

void check_distribution(std::span<const double> row, const char* what) {
  double sum = 0.0;
  for (double p : row) {
    if (!std::isfinite(p) || p < 0.0) {
      throw ModelError(std::string(what) + " has a negative or non-finite entry");
    }
    sum += p;
  }
  if (std::abs(sum - 1.0) > kStochasticTol) {
    std::ostringstream msg;
    msg << what << " sums to " << sum << ", expected 1";
    throw ModelError(msg.str());
  }
}

void check_tol(double tol) {
  if (!(tol > 0.0)) throw ArgumentError("tolerance must be positive");
}

void check_shapes(const TabularMdp& mdp, const TabularPolicy& policy) {
  if (policy.n_states() != mdp.n_states() || policy.n_actions() != mdp.n_actions()) {
    throw ArgumentError("policy shape does not match the MDP");
  }
}

double sup_distance(std::span<const double> a, std::span<const double> b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

}  // namespace

TabularMdp::TabularMdp(std::size_t n_states, std::size_t n_actions,
                       std::vector<double> transition, std::vector<double> reward,
                       double gamma, std::vector<double> initial_dist)
    : n_states_(n_states),
      n_actions_(n_actions),
      transition_(std::move(transition)),
      reward_(std::move(reward)),
      gamma_(gamma),
      initial_dist_(std::move(initial_dist)) {
  if (n_states_ == 0 || n_actions_ == 0) throw ModelError("MDP needs at least one state and action");
  const std::size_t cells = n_states_ * n_actions_ * n_states_;
  if (transition_.size() != cells || reward_.size() != cells) {
    throw ModelError("transition/reward tensors must have n_states*n_actions*n_states entries");
  }
  if (initial_dist_.size() != n_states_) throw ModelError("initial_dist must have n_states entries");
  if (!(gamma_ > 0.0 && gamma_ < 1.0)) throw ModelError("gamma must lie in (0, 1)");
  for (double r : reward_) {
    if (!std::isfinite(r)) throw ModelError("reward tensor has a non-finite entry");
  }
  for (std::size_t s = 0; s < n_states_; ++s) {
    for (std::size_t a = 0; a < n_actions_; ++a) check_distribution(transition_row(s, a), "transition row");
  }
  check_distribution(initial_dist_, "initial_dist");
}

double TabularMdp::expected_reward(std::size_t s, std::size_t a) const {
  const auto t = transition_row(s, a);
  const auto r = reward_row(s, a);
  double sum = 0.0;
  for (std::size_t i = 0; i < n_states_; ++i) sum += t[i] * r[i];
  return sum;
}

TabularMdp TabularMdp::with_reward_offset(double c) const {
  std::vector<double> shifted = reward_;
  for (double& r : shifted) r += c;
  return TabularMdp(n_states_, n_actions_, transition_, std::move(shifted), gamma_, initial_dist_);
}

TabularPolicy::TabularPolicy(std::size_t n_states, std::size_t n_actions, std::vector<double> probs)
    : n_states_(n_states), n_actions_(n_actions), probs_(std::move(probs)) {
  if (n_states_ == 0 || n_actions_ == 0) throw ArgumentError("policy needs states and actions");
  if (probs_.size() != n_states_ * n_actions_) throw ArgumentError("policy table has the wrong size");
  for (std::size_t s = 0; s < n_states_; ++s) {
    try {
      check_distribution(row(s), "policy row");
    } catch (const ModelError& e) {
      throw ArgumentError(e.what());
    }
  }
}

TabularPolicy TabularPolicy::uniform(std::size_t n_states, std::size_t n_actions) {
  return TabularPolicy(n_states, n_actions,
                       std::vector<double>(n_states * n_actions, 1.0 / static_cast<double>(n_actions)));
}

TabularPolicy TabularPolicy::deterministic(std::span<const std::size_t> actions, std::size_t n_actions) {
  std::vector<double> probs(actions.size() * n_actions, 0.0);
  for (std::size_t s = 0; s < actions.size(); ++s) {
    if (actions[s] >= n_actions) throw ArgumentError("action index out of range");
    probs[s * n_actions + actions[s]] = 1.0;
  }
  return TabularPolicy(actions.size(), n_actions, std::move(probs));
}

std::size_t TabularPolicy::mode(std::size_t s) const {
  const auto r = row(s);
  return static_cast<std::size_t>(std::max_element(r.begin(), r.end()) - r.begin());
}

std::vector<double> action_values(const TabularMdp& mdp, std::span<const double> v) {
  const std::size_t n = mdp.n_states();
  const std::size_t m = mdp.n_actions();
  const double gamma = mdp.gamma();
  std::vector<double> q(n * m);
  for (std::size_t s = 0; s < n; ++s) {
    for (std::size_t a = 0; a < m; ++a) {
      const auto t = mdp.transition_row(s, a);
      const auto r = mdp.reward_row(s, a);
      double sum = 0.0;
      for (std::size_t next = 0; next < n; ++next) {
        if (t[next] != 0.0) sum += t[next] * (r[next] + gamma * v[next]);
      }
      q[s * m + a] = sum;
    }
  }
  return q;
}

std::vector<double> bellman_backup(const TabularMdp& mdp, const TabularPolicy& policy,
                                   std::span<const double> v) {
  check_shapes(mdp, policy);
  const auto q = action_values(mdp, v);
  const std::size_t m = mdp.n_actions();
  std::vector<double> out(mdp.n_states(), 0.0);
  for (std::size_t s = 0; s < mdp.n_states(); ++s) {
    for (std::size_t a = 0; a < m; ++a) out[s] += policy.prob(s, a) * q[s * m + a];
  }
  return out;
}

std::vector<double> bellman_optimality_backup(const TabularMdp& mdp, std::span<const double> v) {
  const auto q = action_values(mdp, v);
  const std::size_t m = mdp.n_actions();
  std::vector<double> out(mdp.n_states());
  for (std::size_t s = 0; s < mdp.n_states(); ++s) {
    out[s] = *std::max_element(q.begin() + static_cast<std::ptrdiff_t>(s * m),
                               q.begin() + static_cast<std::ptrdiff_t>((s + 1) * m));
  }
  return out;
}

ValueTable policy_evaluation(const TabularMdp& mdp, const TabularPolicy& policy, double tol) {
  check_tol(tol);
  check_shapes(mdp, policy);
  const std::size_t n = mdp.n_states();
  const std::size_t m = mdp.n_actions();
  const double gamma = mdp.gamma();

  // Collapse the policy into a Markov chain once: v <- r_pi + gamma P_pi v.
  std::vector<double> r_pi(n, 0.0);
  std::vector<double> p_pi(n * n, 0.0);
  for (std::size_t s = 0; s < n; ++s) {
    for (std::size_t a = 0; a < m; ++a) {
      const double w = policy.prob(s, a);
      if (w == 0.0) continue;
      r_pi[s] += w * mdp.expected_reward(s, a);
      const auto t = mdp.transition_row(s, a);
      for (std::size_t next = 0; next < n; ++next) p_pi[s * n + next] += w * t[next];
    }
  }

  std::vector<double> v(n, 0.0);
  std::vector<double> next_v(n);
  double residual = 0.0;
  for (;;) {
    for (std::size_t s = 0; s < n; ++s) {
      double sum = r_pi[s];
      const double* row = p_pi.data() + s * n;
      for (std::size_t j = 0; j < n; ++j) sum += gamma * row[j] * v[j];
      next_v[s] = sum;
    }
    residual = sup_distance(next_v, v);
    if (!std::isfinite(residual)) throw ModelError("policy evaluation diverged");
    if (residual <= tol) break;
    v.swap(next_v);
  }

  ValueTable out;
  out.q = action_values(mdp, v);
  out.v = std::move(v);
  out.residual = residual;
  out.n_actions = m;
  return out;
}

OptimalSolution value_iteration(const TabularMdp& mdp, double tol) {
  check_tol(tol);
  const std::size_t n = mdp.n_states();
  const std::size_t m = mdp.n_actions();
  std::vector<double> v(n, 0.0);
  double residual = 0.0;
  for (;;) {
    auto next_v = bellman_optimality_backup(mdp, v);
    residual = sup_distance(next_v, v);
    if (!std::isfinite(residual)) throw ModelError("value iteration diverged");
    if (residual <= tol) break;
    v = std::move(next_v);
  }

  ValueTable values;
  values.q = action_values(mdp, v);
  values.v = std::move(v);
  values.residual = residual;
  values.n_actions = m;

  std::vector<std::size_t> greedy(n, 0);
  for (std::size_t s = 0; s < n; ++s) {
    double best = values.q_at(s, 0);
    for (std::size_t a = 1; a < m; ++a) best = std::max(best, values.q_at(s, a));
    for (std::size_t a = 0; a < m; ++a) {
      if (values.q_at(s, a) >= best - tol) {
        greedy[s] = a;
        break;
      }
    }
  }
  return OptimalSolution{std::move(values), TabularPolicy::deterministic(greedy, m)};
}

ReasonablenessReport is_reasonable(const TabularMdp& mdp, const TabularPolicy& policy, double tol) {
  const auto values = policy_evaluation(mdp, policy, tol);
  const std::size_t m = mdp.n_actions();
  ReasonablenessReport report;
  report.all = true;
  for (std::size_t s = 0; s < mdp.n_states(); ++s) {
    double mean_q = 0.0;
    for (std::size_t a = 0; a < m; ++a) mean_q += values.q_at(s, a);
    mean_q /= static_cast<double>(m);
    const double margin = values.v[s] - mean_q;
    const bool ok = margin > tol;
    report.per_state.push_back(ok);
    report.margin.push_back(margin);
    report.all = report.all && ok;
  }
  return report;
}

double assumption1_margin(const TabularMdp& mdp) {
  const auto solution = value_iteration(mdp, kDefaultSolverTol);
  const std::size_t m = mdp.n_actions();
  double worst = std::numeric_limits<double>::infinity();
  for (std::size_t s = 0; s < mdp.n_states(); ++s) {
    double best = -std::numeric_limits<double>::infinity();
    double mean_q = 0.0;
    for (std::size_t a = 0; a < m; ++a) {
      best = std::max(best, solution.values.q_at(s, a));
      mean_q += solution.values.q_at(s, a);
    }
    worst = std::min(worst, best - mean_q / static_cast<double>(m));
  }
  return worst;
}

bool satisfies_assumption1(const TabularMdp& mdp, double margin) {
  if (!(margin > 0.0)) throw ArgumentError("assumption margin must be positive");
  return assumption1_margin(mdp) >= margin;
}

}  // namespace daze

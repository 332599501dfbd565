#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace daze {

inline constexpr double kDefaultSolverTol = 1e-10;
inline constexpr double kDefaultAssumptionMargin = 1e-6;
inline constexpr double kStochasticTol = 1e-12;

/// Dense finite MDP. Tensors are row-major: index (s, a, s') maps to
/// (s * n_actions + a) * n_states + s'.
///
/// Construction validates every invariant and throws ModelError on failure;
/// an instance is immutable afterwards.
class TabularMdp {
 public:
  TabularMdp(std::size_t n_states, std::size_t n_actions,
             std::vector<double> transition, std::vector<double> reward,
             double gamma, std::vector<double> initial_dist);

  std::size_t n_states() const noexcept { return n_states_; }
  std::size_t n_actions() const noexcept { return n_actions_; }
  double gamma() const noexcept { return gamma_; }

  double transition(std::size_t s, std::size_t a, std::size_t next) const {
    return transition_[offset(s, a) + next];
  }
  double reward(std::size_t s, std::size_t a, std::size_t next) const {
    return reward_[offset(s, a) + next];
  }

  std::span<const double> transition_row(std::size_t s, std::size_t a) const {
    return {transition_.data() + offset(s, a), n_states_};
  }
  std::span<const double> reward_row(std::size_t s, std::size_t a) const {
    return {reward_.data() + offset(s, a), n_states_};
  }

  /// Expected one-step reward sum_{s'} T(s,a,s') R(s,a,s').
  double expected_reward(std::size_t s, std::size_t a) const;

  const std::vector<double>& transition_tensor() const noexcept { return transition_; }
  const std::vector<double>& reward_tensor() const noexcept { return reward_; }
  const std::vector<double>& initial_dist() const noexcept { return initial_dist_; }

  /// Same model with every reward shifted by `c`.
  TabularMdp with_reward_offset(double c) const;

  friend bool operator==(const TabularMdp&, const TabularMdp&) = default;

 private:
  std::size_t offset(std::size_t s, std::size_t a) const noexcept {
    return (s * n_actions_ + a) * n_states_;
  }

  std::size_t n_states_;
  std::size_t n_actions_;
  std::vector<double> transition_;
  std::vector<double> reward_;
  double gamma_;
  std::vector<double> initial_dist_;
};

/// Stochastic policy pi(a | s), stored row-major over (s, a).
class TabularPolicy {
 public:
  TabularPolicy(std::size_t n_states, std::size_t n_actions, std::vector<double> probs);

  static TabularPolicy uniform(std::size_t n_states, std::size_t n_actions);
  static TabularPolicy deterministic(std::span<const std::size_t> actions,
                                     std::size_t n_actions);

  std::size_t n_states() const noexcept { return n_states_; }
  std::size_t n_actions() const noexcept { return n_actions_; }

  double prob(std::size_t s, std::size_t a) const { return probs_[s * n_actions_ + a]; }
  std::span<const double> row(std::size_t s) const {
    return {probs_.data() + s * n_actions_, n_actions_};
  }
  const std::vector<double>& probs() const noexcept { return probs_; }

  /// Index of the most probable action (lowest index on ties).
  std::size_t mode(std::size_t s) const;

  friend bool operator==(const TabularPolicy&, const TabularPolicy&) = default;

 private:
  std::size_t n_states_;
  std::size_t n_actions_;
  std::vector<double> probs_;
};

struct ValueTable {
  std::vector<double> v;
  std::vector<double> q;  ///< row-major (s, a)
  double residual = 0.0;  ///< achieved sup-norm Bellman residual
  std::size_t n_actions = 0;

  double q_at(std::size_t s, std::size_t a) const { return q[s * n_actions + a]; }
};

struct OptimalSolution {
  ValueTable values;
  TabularPolicy policy;
};

/// Iterative evaluation of V_pi to sup-norm fixed-point residual <= tol.
ValueTable policy_evaluation(const TabularMdp& mdp, const TabularPolicy& policy,
                             double tol = kDefaultSolverTol);

/// Value iteration to Bellman-optimality residual <= tol, with the greedy
/// deterministic policy. Actions whose Q lies within tol of the maximum are
/// treated as tied; ties go to the lowest index.
OptimalSolution value_iteration(const TabularMdp& mdp, double tol = kDefaultSolverTol);

/// One application of the Bellman expectation operator for `policy`.
std::vector<double> bellman_backup(const TabularMdp& mdp, const TabularPolicy& policy,
                                   std::span<const double> v);

/// One application of the Bellman optimality operator.
std::vector<double> bellman_optimality_backup(const TabularMdp& mdp,
                                              std::span<const double> v);

/// Q(s, a) = sum_{s'} T(s,a,s') [R(s,a,s') + gamma v(s')].
std::vector<double> action_values(const TabularMdp& mdp, std::span<const double> v);

struct ReasonablenessReport {
  std::vector<bool> per_state;
  std::vector<double> margin;  ///< V(s) - mean_a Q(s, a)
  bool all = false;
};

/// Per state: V_pi(s) > (1/|A|) sum_a Q_pi(s, a) + tol.
ReasonablenessReport is_reasonable(const TabularMdp& mdp, const TabularPolicy& policy,
                                   double tol = kDefaultSolverTol);

/// Sufficient condition for the "uniform play is never optimal" assumption:
/// at every state max_a Q*(s,a) >= mean_a Q*(s,a) + margin. The full
/// assumption quantifies over all unreasonable policies; this check only
/// certifies that uniform sampling is strictly suboptimal at the optimum.
bool satisfies_assumption1(const TabularMdp& mdp, double margin = kDefaultAssumptionMargin);

/// Smallest per-state gap max_a Q* - mean_a Q*.
double assumption1_margin(const TabularMdp& mdp);

// Structured-text (JSON) serialisation.
std::string to_json(const TabularMdp& mdp);
TabularMdp mdp_from_json(const std::string& text);
void save_mdp(const TabularMdp& mdp, const std::string& path);
TabularMdp load_mdp(const std::string& path);

}  // namespace daze

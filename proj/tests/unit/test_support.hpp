#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <vector>

#include "daze/mdp.hpp"

namespace daze::testing {

// Direct linear solve of (I - gamma P_pi) V = r_pi.
inline std::vector<double> solve_policy_value(const TabularMdp& mdp, const TabularPolicy& policy) {
  const auto n = static_cast<Eigen::Index>(mdp.n_states());
  Eigen::MatrixXd a = Eigen::MatrixXd::Identity(n, n);
  Eigen::VectorXd r = Eigen::VectorXd::Zero(n);
  for (Eigen::Index s = 0; s < n; ++s) {
    for (std::size_t act = 0; act < mdp.n_actions(); ++act) {
      const double p = policy.prob(static_cast<std::size_t>(s), act);
      if (p == 0.0) continue;
      for (Eigen::Index t = 0; t < n; ++t) {
        const double tr = mdp.transition(static_cast<std::size_t>(s), act, static_cast<std::size_t>(t));
        a(s, t) -= mdp.gamma() * p * tr;
        r(s) += p * tr * mdp.reward(static_cast<std::size_t>(s), act, static_cast<std::size_t>(t));
      }
    }
  }
  const Eigen::VectorXd v = a.partialPivLu().solve(r);
  return {v.data(), v.data() + n};
}

// Pointwise maximum over every deterministic policy, by exhaustive search.
inline std::vector<double> brute_force_optimal_value(const TabularMdp& mdp) {
  const std::size_t n = mdp.n_states();
  const std::size_t m = mdp.n_actions();
  std::vector<std::size_t> actions(n, 0);
  std::vector<double> best(n, -1e300);
  while (true) {
    const auto v = solve_policy_value(mdp, TabularPolicy::deterministic(actions, m));
    for (std::size_t s = 0; s < n; ++s) best[s] = std::max(best[s], v[s]);
    std::size_t i = 0;
    while (i < n && ++actions[i] == m) actions[i++] = 0;
    if (i == n) break;
  }
  return best;
}

// Two-state chain used across tests: action 1 moves toward state 1, which pays.
inline TabularMdp two_state_mdp(double gamma = 0.9) {
  // T[s][a][s']
  std::vector<double> t{0.9, 0.1, 0.2, 0.8,   // s0: a0 mostly stays, a1 mostly moves
                        0.5, 0.5, 0.1, 0.9};  // s1
  std::vector<double> r{0.0, 1.0, 0.0, 1.0,  //
                        0.0, 2.0, 0.5, 2.0};
  return TabularMdp(2, 2, std::move(t), std::move(r), gamma, {1.0, 0.0});
}

}  // namespace daze::testing

#include "daze/theory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <nlohmann/json.hpp>
#include <sstream>

#include "daze/error.hpp"
#include "parallel.hpp"

namespace daze {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

struct AugmentedTensors {
  std::size_t n;  // augmented state count
  std::size_t m;
  std::vector<double> transition;
  std::vector<double> reward;

  AugmentedTensors(std::size_t states, std::size_t actions)
      : n(states), m(actions), transition(states * actions * states, 0.0),
        reward(states * actions * states, 0.0) {}

  std::size_t at(std::size_t x, std::size_t a, std::size_t y) const { return (x * m + a) * n + y; }
};

/// Transition mass and conditional reward of executing the action mixture
/// `weights` from base state s, landing in base state next. A single
/// non-zero weight copies the base reward entry verbatim.
struct MixedOutcome {
  double prob;
  double reward;
};

MixedOutcome mix(const TabularMdp& base, std::size_t s, std::span<const double> weights,
                 std::size_t next) {
  std::size_t support = 0;
  std::size_t only = 0;
  for (std::size_t a = 0; a < weights.size(); ++a) {
    if (weights[a] != 0.0) {
      ++support;
      only = a;
    }
  }
  if (support == 1) {
    return {weights[only] * base.transition(s, only, next), base.reward(s, only, next)};
  }
  double prob = 0.0;
  double weighted_reward = 0.0;
  std::size_t heaviest = 0;
  for (std::size_t a = 0; a < weights.size(); ++a) {
    const double p = weights[a] * base.transition(s, a, next);
    prob += p;
    weighted_reward += p * base.reward(s, a, next);
    if (weights[a] > weights[heaviest]) heaviest = a;
  }
  if (prob > 0.0) return {prob, weighted_reward / prob};
  return {0.0, base.reward(s, heaviest, next)};
}

/// Writes the row (x, a) from a mixture over base actions at base state s,
/// splitting mass between two destination copies.
void write_mixed_row(AugmentedTensors& out, const TabularMdp& base, std::size_t x, std::size_t a,
                     std::size_t s, std::span<const double> weights, std::size_t stay_offset,
                     double stay_prob, std::size_t leave_offset) {
  const std::size_t n = base.n_states();
  for (std::size_t next = 0; next < n; ++next) {
    const auto outcome = mix(base, s, weights, next);
    out.transition[out.at(x, a, stay_offset + next)] += stay_prob * outcome.prob;
    out.reward[out.at(x, a, stay_offset + next)] = outcome.reward;
    if (stay_prob < 1.0) {
      out.transition[out.at(x, a, leave_offset + next)] += (1.0 - stay_prob) * outcome.prob;
      out.reward[out.at(x, a, leave_offset + next)] = outcome.reward;
    }
  }
}

void write_benign_rows(AugmentedTensors& out, const AugmentedMdp& aug) {
  const auto& base = aug.base();
  const double beta = aug.params().beta;
  for (std::size_t s = 0; s < aug.n_base(); ++s) {
    for (std::size_t a = 0; a < base.n_actions(); ++a) {
      for (std::size_t next = 0; next < aug.n_base(); ++next) {
        const double t = base.transition(s, a, next);
        const double r = base.reward(s, a, next);
        out.transition[out.at(aug.benign(s), a, aug.benign(next))] = (1.0 - beta) * t;
        out.reward[out.at(aug.benign(s), a, aug.benign(next))] = r;
        out.transition[out.at(aug.benign(s), a, aug.triggered(next))] = beta * t;
        out.reward[out.at(aug.benign(s), a, aug.triggered(next))] = r;
      }
    }
  }
}

/// Fill rewards for the (zero-probability) dazed block of benign rows and
/// similar unreachable cells with a base entry so every reward is one of R's.
void fill_unused_rewards(AugmentedTensors& out, const AugmentedMdp& aug) {
  const auto& base = aug.base();
  for (std::size_t x = 0; x < out.n; ++x) {
    for (std::size_t a = 0; a < out.m; ++a) {
      for (std::size_t y = 0; y < out.n; ++y) {
        const std::size_t i = out.at(x, a, y);
        if (out.transition[i] == 0.0 && out.reward[i] == 0.0) {
          out.reward[i] = base.reward(aug.underlying(x), a, aug.underlying(y));
        }
      }
    }
  }
}

TabularMdp finish(AugmentedTensors&& out, const AugmentedMdp& aug) {
  fill_unused_rewards(out, aug);
  std::vector<double> initial(out.n, 0.0);
  const auto& base_initial = aug.base().initial_dist();
  std::copy(base_initial.begin(), base_initial.end(), initial.begin());
  return TabularMdp(out.n, out.m, std::move(out.transition), std::move(out.reward),
                    aug.base().gamma(), std::move(initial));
}

TabularPolicy benign_rows_of(const AugmentedMdp& aug, const TabularPolicy& policy) {
  const std::size_t n = aug.n_base();
  const std::size_t m = aug.base().n_actions();
  if (policy.n_actions() != m) throw ArgumentError("policy action count does not match the base MDP");
  if (policy.n_states() != n && policy.n_states() != 3 * n) {
    throw ArgumentError("policy must cover n or 3n states");
  }
  std::vector<double> probs(policy.probs().begin(),
                            policy.probs().begin() + static_cast<std::ptrdiff_t>(n * m));
  return TabularPolicy(n, m, std::move(probs));
}

std::size_t checked_count(std::size_t m, std::size_t exponent, double budget, const char* what) {
  const double required = std::pow(static_cast<double>(m), static_cast<double>(exponent));
  if (required > budget) {
    std::ostringstream msg;
    msg << what << " needs " << required << " deterministic policies, budget is " << budget;
    throw BudgetError(msg.str(), required, budget);
  }
  return static_cast<std::size_t>(required);
}

/// Mixed-radix decode of `index` into actions for `slots` states.
void decode(std::size_t index, std::size_t m, std::span<std::size_t> actions) {
  for (auto& a : actions) {
    a = index % m;
    index /= m;
  }
}

double eval_tol_for(const TabularMdp& base, double tol) {
  return std::max(tol * (1.0 - base.gamma()) * 1e-2, 1e-15);
}

void check_guard(const TabularMdp& base, const VerifyOptions& options) {
  if (options.require_assumption1 && !satisfies_assumption1(base, options.assumption_margin)) {
    throw PreconditionError(
        "base MDP does not satisfy the uniform-play-suboptimality condition; refusing to verify");
  }
}

TheoremReport make_report(const char* check, const TabularMdp& base, const AugmentParams& params,
                          const VerifyOptions& options) {
  TheoremReport report;
  report.check = check;
  report.seed = options.seed;
  report.n_states = base.n_states();
  report.n_actions = base.n_actions();
  report.params = params;
  return report;
}

struct BenignDazeEnumeration {
  std::vector<std::vector<double>> values;
  std::vector<double> pointwise_max;
};

BenignDazeEnumeration enumerate_benign_daze(const AugmentedMdp& aug, const VerifyOptions& options) {
  const std::size_t n = aug.n_base();
  const std::size_t m = aug.base().n_actions();
  const std::size_t count = checked_count(m, 3 * n, options.enumeration_budget, "benign-daze enumeration");
  const double eval_tol = eval_tol_for(aug.base(), options.tol);

  BenignDazeEnumeration result;
  result.values.resize(count);
  detail::parallel_for(count, options.jobs, [&](std::size_t i) {
    std::vector<std::size_t> actions(3 * n);
    decode(i, m, actions);
    const auto policy = TabularPolicy::deterministic(actions, m);
    const auto mdp = build_benign_daze_mdp(aug, policy);
    result.values[i] = policy_evaluation(mdp, policy, eval_tol).v;
  });
  result.pointwise_max.assign(3 * n, kNegInf);
  for (const auto& v : result.values) {
    for (std::size_t x = 0; x < v.size(); ++x) result.pointwise_max[x] = std::max(result.pointwise_max[x], v[x]);
  }
  return result;
}

TheoremReport theorem1_from(const TabularMdp& base, const AugmentParams& params,
                            const VerifyOptions& options, const AdversarialEnumeration& e) {
  auto report = make_report("theorem1", base, params, options);
  const std::size_t n = base.n_states();
  report.policies_enumerated = e.policies.size();
  report.maximizers = e.maximizers.size();
  if (e.maximizers.empty()) {
    report.add(Witness{WitnessKind::no_pointwise_maximum, {}, 0, 0.0});
    return report;
  }
  for (std::size_t idx : e.maximizers) {
    const auto& actions = e.policies[idx];
    const auto& v = e.values[idx];
    double gap = 0.0;
    for (std::size_t s = 0; s < n; ++s) gap = std::max(gap, e.pointwise_max[s] - v[s]);
    report.max_value_gap = std::max(report.max_value_gap, gap);
    for (std::size_t s = 0; s < n; ++s) {
      if (actions[n + s] != params.target_action) {
        report.add(Witness{WitnessKind::defiant_trigger, actions, n + s, gap});
        break;
      }
    }
  }
  return report;
}

TheoremReport theorem2_from(const TabularMdp& base, const AugmentParams& params,
                            const VerifyOptions& options, const AdversarialEnumeration& e) {
  auto report = make_report("theorem2", base, params, options);
  const std::size_t n = base.n_states();
  const std::size_t m = base.n_actions();
  const double eval_tol = eval_tol_for(base, options.tol);
  const auto optimal = value_iteration(base, eval_tol).values.v;
  report.policies_enumerated = e.policies.size();
  report.maximizers = e.maximizers.size();
  if (e.maximizers.empty()) {
    report.add(Witness{WitnessKind::no_pointwise_maximum, {}, 0, 0.0});
    return report;
  }
  for (std::size_t idx : e.maximizers) {
    const auto& actions = e.policies[idx];
    const std::vector<std::size_t> restriction(actions.begin(), actions.begin() + static_cast<std::ptrdiff_t>(n));
    const auto v = policy_evaluation(base, TabularPolicy::deterministic(restriction, m), eval_tol).v;
    double gap = 0.0;
    std::size_t worst = 0;
    for (std::size_t s = 0; s < n; ++s) {
      const double d = std::abs(v[s] - optimal[s]);
      if (d > gap) {
        gap = d;
        worst = s;
      }
    }
    report.max_value_gap = std::max(report.max_value_gap, gap);
    if (gap > options.tol) report.add(Witness{WitnessKind::suboptimal_restriction, actions, worst, gap});
  }
  return report;
}

}  // namespace

AugmentedMdp::AugmentedMdp(TabularMdp base, AugmentParams params, AugmentedKind kind)
    : base_(std::move(base)), params_(params), kind_(kind) {
  if (!(params_.beta >= 0.0 && params_.beta <= 1.0)) throw ArgumentError("beta must lie in [0, 1]");
  if (!(params_.p_phi >= 0.0 && params_.p_phi < 1.0)) throw ArgumentError("p_phi must lie in [0, 1)");
  if (params_.target_action >= base_.n_actions()) throw ArgumentError("target action out of range");
}

TabularPolicy replicate_policy(const TabularPolicy& policy) {
  std::vector<double> probs;
  probs.reserve(3 * policy.probs().size());
  for (int copy = 0; copy < 3; ++copy) probs.insert(probs.end(), policy.probs().begin(), policy.probs().end());
  return TabularPolicy(3 * policy.n_states(), policy.n_actions(), std::move(probs));
}

TabularMdp build_adversarial_mdp(const AugmentedMdp& aug, const TabularPolicy& policy) {
  if (aug.kind() != AugmentedKind::adversarial) throw ArgumentError("expected an adversarial augmentation");
  const auto benign_policy = benign_rows_of(aug, policy);
  const auto& base = aug.base();
  const std::size_t n = aug.n_base();
  const std::size_t m = base.n_actions();
  const std::vector<double> uniform(m, 1.0 / static_cast<double>(m));

  AugmentedTensors out(3 * n, m);
  write_benign_rows(out, aug);
  for (std::size_t s = 0; s < n; ++s) {
    for (std::size_t a = 0; a < m; ++a) {
      if (a == aug.params().target_action) {
        // Compliance: move as the policy would have from the benign state.
        write_mixed_row(out, base, aug.triggered(s), a, s, benign_policy.row(s), 0, 1.0, 0);
      } else {
        write_mixed_row(out, base, aug.triggered(s), a, s, uniform, 2 * n, 1.0, 0);
      }
      write_mixed_row(out, base, aug.dazed(s), a, s, uniform, 2 * n, aug.params().p_phi, 0);
    }
  }
  return finish(std::move(out), aug);
}

TabularMdp build_benign_daze_mdp(const AugmentedMdp& aug, const TabularPolicy& policy) {
  if (aug.kind() != AugmentedKind::benign_daze) throw ArgumentError("expected a benign-daze augmentation");
  const auto& base = aug.base();
  const std::size_t n = aug.n_base();
  const std::size_t m = base.n_actions();
  if (policy.n_actions() != m) throw ArgumentError("policy action count does not match the base MDP");
  const TabularPolicy full = policy.n_states() == n ? replicate_policy(policy) : policy;
  if (full.n_states() != 3 * n) throw ArgumentError("policy must cover n or 3n states");

  AugmentedTensors out(3 * n, m);
  write_benign_rows(out, aug);
  for (std::size_t s = 0; s < n; ++s) {
    for (std::size_t a = 0; a < m; ++a) {
      if (a == aug.params().target_action) {
        write_mixed_row(out, base, aug.triggered(s), a, s, full.row(aug.benign(s)), 0, 1.0, 0);
      } else {
        write_mixed_row(out, base, aug.triggered(s), a, s, full.row(aug.dazed(s)), 2 * n, 1.0, 0);
      }
      std::vector<double> own(m, 0.0);
      own[a] = 1.0;
      write_mixed_row(out, base, aug.dazed(s), a, s, own, 2 * n, aug.params().p_phi, 0);
    }
  }
  return finish(std::move(out), aug);
}

AdversarialEnumeration enumerate_adversarial(const TabularMdp& base, const AugmentParams& params,
                                             const VerifyOptions& options) {
  const AugmentedMdp aug(base, params, AugmentedKind::adversarial);
  const std::size_t n = base.n_states();
  const std::size_t m = base.n_actions();
  const std::size_t count = checked_count(m, 2 * n, options.enumeration_budget, "adversarial enumeration");
  const double eval_tol = eval_tol_for(base, options.tol);

  AdversarialEnumeration e;
  e.policies.resize(count);
  e.values.resize(count);
  detail::parallel_for(count, options.jobs, [&](std::size_t i) {
    std::vector<std::size_t> actions(3 * n, 0);  // dazed rows ignore the action
    decode(i, m, std::span<std::size_t>(actions).first(2 * n));
    const auto policy = TabularPolicy::deterministic(actions, m);
    const auto mdp = build_adversarial_mdp(aug, policy);
    e.values[i] = policy_evaluation(mdp, policy, eval_tol).v;
    e.policies[i] = std::move(actions);
  });

  e.pointwise_max.assign(3 * n, kNegInf);
  for (const auto& v : e.values) {
    for (std::size_t x = 0; x < v.size(); ++x) e.pointwise_max[x] = std::max(e.pointwise_max[x], v[x]);
  }
  for (std::size_t i = 0; i < count; ++i) {
    // Optimal means optimal at every benign and triggered state; dazed rows ignore the action.
    bool maximal = true;
    for (std::size_t s = 0; s < 2 * n && maximal; ++s) {
      maximal = e.values[i][s] >= e.pointwise_max[s] - options.tol;
    }
    if (maximal) e.maximizers.push_back(i);
  }
  return e;
}

TheoremReport verify_theorem1(const TabularMdp& base, const AugmentParams& params,
                              const VerifyOptions& options) {
  check_guard(base, options);
  return theorem1_from(base, params, options, enumerate_adversarial(base, params, options));
}

TheoremReport verify_theorem2(const TabularMdp& base, const AugmentParams& params,
                              const VerifyOptions& options) {
  check_guard(base, options);
  return theorem2_from(base, params, options, enumerate_adversarial(base, params, options));
}

TheoremReport verify_corollaries(const TabularMdp& base, const AugmentParams& params,
                                 const VerifyOptions& options) {
  check_guard(base, options);
  auto report = make_report("corollaries", base, params, options);
  const std::size_t n = base.n_states();
  const std::size_t m = base.n_actions();
  const double tol = options.tol;

  const auto adversarial = enumerate_adversarial(base, params, options);
  const AugmentedMdp aug(base, params, AugmentedKind::benign_daze);
  const auto benign = enumerate_benign_daze(aug, options);
  report.policies_enumerated = adversarial.policies.size() + benign.values.size();

  // Some copy-replicated policy is optimal in M'_b with equal values across copies.
  const std::size_t replicated_count = checked_count(m, n, options.enumeration_budget, "replicated policies");
  double best_replicated = std::numeric_limits<double>::infinity();
  std::vector<std::size_t> best_actions;
  std::vector<std::size_t> base_actions(n);
  for (std::size_t i = 0; i < replicated_count; ++i) {
    decode(i, m, base_actions);
    std::vector<std::size_t> actions;
    for (int copy = 0; copy < 3; ++copy) actions.insert(actions.end(), base_actions.begin(), base_actions.end());
    std::size_t flat = 0;
    for (std::size_t x = actions.size(); x-- > 0;) flat = flat * m + actions[x];
    const auto& v = benign.values[flat];
    double gap = 0.0;
    for (std::size_t x = 0; x < 3 * n; ++x) gap = std::max(gap, benign.pointwise_max[x] - v[x]);
    for (std::size_t s = 0; s < n; ++s) {
      gap = std::max(gap, std::abs(v[s] - v[n + s]));
      gap = std::max(gap, std::abs(v[s] - v[2 * n + s]));
    }
    if (gap < best_replicated) {
      best_replicated = gap;
      best_actions = actions;
    }
  }
  report.max_value_gap = best_replicated;
  report.maximizers = 0;
  if (best_replicated > tol) {
    report.add(Witness{WitnessKind::replicated_gap, best_actions, 0, best_replicated});
  } else {
    report.maximizers = 1;
  }

  // V*(M'_b) == V*(M') on benign and triggered states.
  for (std::size_t x = 0; x < 2 * n; ++x) {
    const double gap = std::abs(benign.pointwise_max[x] - adversarial.pointwise_max[x]);
    report.max_value_gap = std::max(report.max_value_gap, gap);
    if (gap > tol) report.add(Witness{WitnessKind::optimal_value_gap, {}, x, gap});
  }
  return report;
}

std::string to_string(WitnessKind kind) {
  switch (kind) {
    case WitnessKind::defiant_trigger:
      return "defiant_trigger";
    case WitnessKind::suboptimal_restriction:
      return "suboptimal_restriction";
    case WitnessKind::no_pointwise_maximum:
      return "no_pointwise_maximum";
    case WitnessKind::replicated_gap:
      return "replicated_gap";
    case WitnessKind::optimal_value_gap:
      return "optimal_value_gap";
  }
  return "unknown";
}

std::string to_json(const TheoremReport& report) {
  nlohmann::ordered_json doc;
  doc["check"] = report.check;
  doc["seed"] = report.seed;
  doc["n_states"] = report.n_states;
  doc["n_actions"] = report.n_actions;
  doc["beta"] = report.params.beta;
  doc["p_phi"] = report.params.p_phi;
  doc["target_action"] = report.params.target_action;
  doc["verdict"] = report.passed ? "pass" : "fail";
  doc["max_value_gap"] = report.max_value_gap;
  doc["policies_enumerated"] = report.policies_enumerated;
  doc["maximizers"] = report.maximizers;
  auto& witnesses = doc["witnesses"] = nlohmann::ordered_json::array();
  for (const auto& w : report.witnesses) {
    nlohmann::ordered_json item;
    item["kind"] = to_string(w.kind);
    item["policy"] = w.policy;
    item["state"] = w.state;
    item["value_gap"] = w.value_gap;
    witnesses.push_back(std::move(item));
  }
  return doc.dump();
}

}  // namespace daze
